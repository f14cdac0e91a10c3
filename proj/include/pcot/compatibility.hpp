#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pcot/circuit.hpp"

namespace pcot {

// Variable bijection between two circuits: bij[p_var] = q_var.
using Bijection = std::vector<VarId>;

Bijection identity_bijection(int num_vars);
// Throws BijectionError unless bij is a permutation of 0..num_vars-1.
void check_bijection(const Bijection& bij, int num_vars);

Bijection load_bijection(const std::string& path);
void save_bijection(const std::string& path, const Bijection& bij);

// How a circuit hierarchically splits its scope: every node is a scope with
// the parts it decomposes into (leaves are singleton scopes).
struct ScopePartitionTree {
    struct PNode {
        std::vector<VarId> scope;
        std::vector<int> children;
    };
    std::vector<PNode> nodes;
    int root = -1;
};

// Throws InconsistentDecompositionError if two product nodes with the same
// scope split it differently.
ScopePartitionTree extract_partition(const Circuit& c);

struct CompatibilityResult {
    bool compatible = false;
    std::string reason;  // names the first offending product pair when incompatible
    // every (p product, q product) pair with equal mapped scope
    std::vector<std::pair<int, int>> product_pairs;
    ScopePartitionTree partition;  // the shared hierarchy, when compatible
};

// Two smooth decomposable circuits are compatible under bij iff every pair
// of product nodes with the same (mapped) scope decomposes it into the same
// parts. Pairing is by scope, so the check is O(|P|*|Q|) in the worst case.
CompatibilityResult check_compatible(const Circuit& p, const Circuit& q, const Bijection& bij);

} // namespace pcot
