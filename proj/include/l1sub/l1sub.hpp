// Umbrella header.

#ifndef L1SUB_L1SUB_HPP
#define L1SUB_L1SUB_HPP

#include "bench.hpp"
#include "numerics.hpp"
#include "objective.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "solvers.hpp"
#include "verify.hpp"
#include "version.hpp"

#endif  // L1SUB_L1SUB_HPP
