#pragma once

// Exact discrete optimal-transport solvers used by the set metrics.

#include <vector>

#include "grassdict/linops.hpp"

namespace grassdict::transport {

struct Assignment {
  std::vector<int> row_to_col;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method,
/// O(n^3)).
[[nodiscard]] Assignment solve_assignment(const Mat& cost);

struct Plan {
  Mat flow;  // rows = sources, cols = sinks
  double cost = 0.0;
  int pivots = 0;
};

/// Balanced transportation problem: north-west-corner start followed by
/// MODI (u-v potential) pivoting. supply and demand must be nonnegative with
/// equal totals (within 1e-9).
[[nodiscard]] Plan solve_transportation(const Vec& supply, const Vec& demand, const Mat& cost);

/// Whether a coupling of (supply, demand) exists whose support lies inside
/// the allowed cells. When it does and flow is non-null, writes one such
/// coupling.
[[nodiscard]] bool coupling_feasible(const Vec& supply, const Vec& demand,
                                     const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed,
                                     Mat* flow = nullptr);

struct Bottleneck {
  double value = 0.0;
  Mat flow;
};

/// min over couplings of the largest distance on the coupling's support,
/// by bisection over the sorted distinct entries of dist.
[[nodiscard]] Bottleneck solve_bottleneck(const Vec& supply, const Vec& demand, const Mat& dist);

}  // namespace grassdict::transport
