#pragma once

#include <cstdint>

#include "pcot/circuit.hpp"
#include "pcot/compatibility.hpp"

namespace pcot {

struct GenSpec {
    int v = 2;                               // variable count
    int k = 2;                               // sum branching factor / components per region
    LeafKind leaf_kind = LeafKind::Bernoulli;
    int cat_m = 3;                           // categorical support size
    std::uint64_t seed = 0;
    double weight_alpha = 1.0;               // symmetric Dirichlet concentration for sum weights
};

struct GeneratedPair {
    Circuit p, q;
    ScopePartitionTree partition;
};

// One random near-balanced binary scope partition, two circuits over it with
// independently drawn parameters. Per region: k component sums; in an
// internal region each sum gets its own k products, the u-th pairing the
// child regions' u-th components; in a leaf region each sum gets k private
// leaves. The root region carries a single sum. Compatible under the
// identity bijection by construction, deterministic in the seed.
GeneratedPair generate_pair(const GenSpec& spec);

} // namespace pcot
