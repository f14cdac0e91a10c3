#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "pcot/circuit.hpp"
#include "pcot/circuit_json.hpp"
#include "pcot/compatibility.hpp"

namespace pcot {

// Transport plan between two compatible circuits, itself a circuit over the
// doubled variable set: X keeps ids 0..v-1, Y variable j becomes v+j. Sum
// nodes hold the pairwise transport weights between the two source sums
// whose marginals are pinned in `sums`.
struct CouplingCircuit {
    Circuit circuit;
    int vars_per_side = 0;
    int p_order = 1;
    double optimal_cost = 0.0;  // CW_p^p found at construction
    // node id -> (p node id, q node id)
    std::vector<std::pair<int, int>> provenance;

    struct SumInfo {
        int node = -1;
        int rows = 0, cols = 0;              // child grid dims (p side x q side)
        std::vector<double> row_w, col_w;    // source sum weights
    };
    std::vector<SumInfo> sums;
};

// Builds the optimal coupling bottom-up: leaf pairs get closed-form
// univariate plans, product pairs couple corresponding children, sum pairs
// solve an exact transportation problem over the child cost grid. Node
// pairs are memoized, so at most |P|*|Q| pairs exist. Pairs on the same
// height level are independent and run through OpenMP when enabled; results
// land in per-pair slots and assembly is serial, so the output is identical
// regardless of schedule.
//
// Throws NotCompatibleError (with the offending pair) when the circuits are
// not compatible under bij, UnsupportedPairError for leaf kinds without a
// closed form at this order.
CouplingCircuit couple(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order);
// Reference implementation: identical result, no parallel sections.
CouplingCircuit couple_serial(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order);

// Distance-only variant: same recursion and the same exact per-sum solves,
// but keeps only the optimal cost of each node pair — no plans and no output
// circuit are materialized. Equals couple(...).optimal_cost; used where just
// the distance is wanted (benchmarks, rank studies) since assembling the
// coupling circuit costs as much as its size.
double cw_cost(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order);

// Expected transport cost of the coupling under its *current* weights
// (leaf plans and sum weights may have been edited). Verifies each sum's
// weights against the pinned marginals within 1e-6 and throws
// InfeasibleWeightsError otherwise.
double cw_objective(const CouplingCircuit& c);

// Conditional circuit over Y given X = x. Degenerate (affine) leaves
// condition to point masses; discrete leaves to their conditional rows.
// Throws ZeroEvidenceError when x has no support under the X marginal.
Circuit transport_condition(const CouplingCircuit& c, const std::vector<double>& x);

// Barycentric map: E[Y | X = x], indexed by the Y circuit's variables.
std::vector<double> transport_point(const CouplingCircuit& c, const std::vector<double>& x);

// Pointwise interpolation between x and its image y at time t in [0,1].
std::vector<double> geodesic_point(const std::vector<double>& x, const std::vector<double>& y, double t);

json coupling_to_json(const CouplingCircuit& c);
CouplingCircuit coupling_from_json(const json& j);
void save_coupling(const std::string& path, const CouplingCircuit& c);
CouplingCircuit load_coupling(const std::string& path);

} // namespace pcot
