#pragma once

// Umbrella header: the whole toolkit in one include.

#include "gradopt/config.hpp"
#include "gradopt/diagnostics.hpp"
#include "gradopt/experiments.hpp"
#include "gradopt/format.hpp"
#include "gradopt/kernels.hpp"
#include "gradopt/objectives.hpp"
#include "gradopt/parallel.hpp"
#include "gradopt/quadrature.hpp"
#include "gradopt/rng.hpp"
#include "gradopt/scheduler.hpp"
#include "gradopt/smoothing.hpp"
#include "gradopt/solver.hpp"
#include "gradopt/types.hpp"
