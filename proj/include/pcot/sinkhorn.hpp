#pragma once

#include <vector>

namespace pcot {

struct SinkhornResult {
    std::vector<std::vector<double>> plan;
    double objective = 0.0;       // unregularized: sum(plan * cost)
    bool converged = false;       // marginal violation reached tol
    int iterations = 0;
    double marginal_error = 0.0;  // L1 row-marginal violation of the returned plan
};

// Log-domain Sinkhorn for entropy-regularized transport. epsilon <= 0 picks
// the default 0.1 * mean(cost). Non-convergence is not an error: the best
// iterate comes back with converged=false.
SinkhornResult sinkhorn(const std::vector<double>& row_weights, const std::vector<double>& col_weights,
                        const std::vector<std::vector<double>>& cost, double epsilon,
                        int max_iter = 10000, double tol = 1e-9);

} // namespace pcot
