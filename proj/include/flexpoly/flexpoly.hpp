#pragma once

// Umbrella header: device models, exact set-function pairs, aggregation,
// greedy/decomposition solvers, disaggregation, brute-force cross-checks,
// and the file formats used by the command-line tool.

#include "flexpoly/aggregate.hpp"
#include "flexpoly/core.hpp"
#include "flexpoly/disaggregate.hpp"
#include "flexpoly/io.hpp"
#include "flexpoly/optimize.hpp"
#include "flexpoly/refcheck.hpp"
#include "flexpoly/rng.hpp"
#include "flexpoly/scenario.hpp"
#include "flexpoly/setfn.hpp"
#include "flexpoly/simplex.hpp"
