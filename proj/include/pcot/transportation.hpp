#pragma once

#include <vector>

namespace pcot {

struct TransportPlan {
    std::vector<std::vector<double>> plan;  // rows x cols, nonnegative, marginals match inputs
    double objective = 0.0;
};

// Exact balanced transportation: minimize sum(plan*cost) subject to row sums
// = row_weights and column sums = col_weights. Both weight vectors must be
// nonnegative and sum to one (within 1e-6, then rescaled exactly).
//
// Network simplex on the bipartite graph, northwest-corner start. Entering
// arc by deterministic block search (fixed block size, round-robin start,
// lowest index wins ties); after a streak of degenerate pivots the rule
// drops to Bland's lowest-index arc until flow moves again, which keeps the
// anti-cycling guarantee. No randomness, no schedule dependence: a given
// input always produces the same plan.
//
// Throws InfeasibleError on negative weights or unbalanced sums,
// LengthMismatchError when the cost matrix shape disagrees.
TransportPlan solve_transportation(const std::vector<double>& row_weights,
                                   const std::vector<double>& col_weights,
                                   const std::vector<std::vector<double>>& cost);

// Same solve, objective only — skips materializing the plan matrix. Useful
// in inner loops that solve many small programs and discard the plans.
double transportation_cost(const std::vector<double>& row_weights,
                           const std::vector<double>& col_weights,
                           const std::vector<std::vector<double>>& cost);

} // namespace pcot
