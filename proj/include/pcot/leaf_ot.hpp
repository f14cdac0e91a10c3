#pragma once

#include "pcot/circuit.hpp"

namespace pcot {

struct LeafOT {
    double cost = 0.0;  // W_p^p between the two leaves
    OTPlan plan;
};

// Closed-form univariate optimal transport between two leaves of the same
// kind. Discrete kinds use the monotone quantile coupling; Gaussians (p=2
// only) use the affine monotone map. Everything else: UnsupportedPairError.
LeafOT leaf_wasserstein(const Leaf& a, const Leaf& b, int p);

// Cost only, no plan, no allocation. Same sweep in the same order, so the
// value is bit-identical to leaf_wasserstein(a, b, p).cost.
double leaf_wasserstein_cost(const Leaf& a, const Leaf& b, int p);

} // namespace pcot
