#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pcot/circuit.hpp"
#include "pcot/dataset.hpp"

namespace pcot {

struct WMConfig {
    int p_order = 2;
    double stochastic_p = 0.0;  // probability of routing a point to a uniform child; 0 = deterministic
    int max_iters = 50;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
    double sigma_floor = kSigmaFloor;
    double prob_floor = kProbFloor;
};

// Expected distances E_node[|X - d_k|^p] for every (node, datapoint).
struct DistanceCache {
    int num_nodes = 0;
    int num_points = 0;
    std::vector<double> table;  // point-major

    double at(int node, int k) const { return table[size_t(k) * num_nodes + node]; }
    double& at(int node, int k) { return table[size_t(k) * num_nodes + node]; }
};

// Where each datapoint went. Deterministic routing sends every point wholly
// through one child per sum, so per (sum, point) a single child position
// suffices; w_{r,c,k} is derived.
struct RoutingTable {
    std::vector<int> sum_nodes;            // node ids of the sums, ascending
    std::vector<std::vector<int>> choice;  // [sum][point] -> child position, -1 = never arrives
    std::vector<int> arrived;              // [sum] points that reached it
    int empty_routes = 0;                  // sum children left without any point

    double weight(int sum, int child_pos, int point) const {
        return choice[sum][point] == child_pos ? 1.0 / arrived[sum] : 0.0;
    }
};

// Bottom-up cache build. Gaussian leaves need p=2 (closed form); discrete
// data must lie in the leaf supports.
DistanceCache inference_pass(const Circuit& c, const Dataset& data, int p_order);

// One top-down routing + parameter update against a cache built for this
// circuit and data. `iteration` only salts the stochastic-routing draws.
std::pair<Circuit, RoutingTable> learn_pass(const Circuit& c, const Dataset& data,
                                            const DistanceCache& cache, const WMConfig& cfg,
                                            int iteration = 0);

// Empirical circuit Wasserstein ECW_p^p of the current parameters: mean over
// datapoints of the greedily routed expected distance.
double ecw(const Circuit& c, const Dataset& data, int p_order);

struct WMResult {
    Circuit circuit;
    // trace[0] is the starting ECW, then one entry per iteration taken
    std::vector<double> trace;
};

WMResult fit_wm(const Circuit& c, const Dataset& data, const WMConfig& cfg);

// -(1/(n v ln 2)) sum_k log p(d_k). Throws ZeroLikelihoodError when any
// point has zero density.
double bits_per_dimension(const Circuit& c, const Dataset& data);

} // namespace pcot
