#pragma once

#include <cstdint>
#include <vector>

#include "pcot/circuit.hpp"
#include "pcot/transportation.hpp"

namespace pcot {

// A circuit flattened into a mixture of fully factorized components.
// Components index into a shared leaf pool instead of owning their leaves:
// at the 10^6-component cap the indexed form is what keeps this in memory.
struct MixtureForm {
    int num_vars = 0;
    std::vector<double> weights;            // one per component, sums to 1
    std::vector<Leaf> leaves;               // distinct leaves of the source circuit
    std::vector<std::vector<int>> factors;  // factors[c][v] -> index into leaves
};

// Number of factorized components the circuit unrolls into, without
// unrolling. Exact while below 2^53, which is far past any feasible cap.
double unroll_count(const Circuit& c);

// Distributes sums over products top-down. Throws TooLargeError when the
// component count exceeds the cap.
MixtureForm unroll(const Circuit& c, double cap = 1e6);

// Density/mass of the mixture at a full assignment; matches evaluate() on
// the source circuit.
double mixture_evaluate(const MixtureForm& m, const std::vector<double>& x);

struct DistanceResult {
    double distance_p_power = 0.0;
    TransportPlan plan;
};

// W_p^p between the mixtures, coupling whole components: the cost of a
// component pair is the sum of per-variable leaf distances (components are
// product measures), weights enter a transportation program.
DistanceResult mixture_wasserstein(const MixtureForm& p, const MixtureForm& q, int p_order);

// Ground-truth W_p^p by enumerating both supports and solving the full
// transportation program. Discrete circuits only; the joint program is
// capped at 2^16 cells. Assignments enumerate lexicographically, variable 0
// outermost — the plan layout is part of the contract.
DistanceResult exact_wasserstein(const Circuit& p, const Circuit& q, int p_order);

// Plug-in estimate: n samples from each circuit, uniform weights, pairwise
// |x-y|_p^p costs, Sinkhorn objective. epsilon <= 0 picks the solver default.
double sinkhorn_between_circuits(const Circuit& p, const Circuit& q, int p_order, int n,
                                 double epsilon, std::uint64_t seed);

// Kendall rank correlation, tie-adjusted (tau-b).
double kendall_tau(const std::vector<double>& a, const std::vector<double>& b);

} // namespace pcot
