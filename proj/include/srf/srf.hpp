#pragma once

// Umbrella header: the whole toolkit in one include.

#include "srf/types.hpp"
#include "srf/random.hpp"
#include "srf/operators.hpp"
#include "srf/surrogate.hpp"
#include "srf/projection.hpp"
#include "srf/solver.hpp"
#include "srf/nnm.hpp"
#include "srf/ssp.hpp"
#include "srf/io.hpp"
#include "srf/experiments.hpp"
