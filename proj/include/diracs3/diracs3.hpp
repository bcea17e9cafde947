#pragma once

#include "blocks.hpp"
#include "common.hpp"
#include "eigen.hpp"
#include "gershgorin.hpp"
#include "inverse.hpp"
#include "metric.hpp"
#include "spectrum.hpp"
