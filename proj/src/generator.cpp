#include "pcot/generator.hpp"

#include <algorithm>
#include <random>

#include "pcot/rng.hpp"

namespace pcot {

namespace {

std::vector<double> dirichlet(int k, double alpha, rng::Key key) {
    auto eng = key.engine();
    std::gamma_distribution<double> g(alpha, 1.0);
    std::vector<double> w(k);
    double total = 0;
    for (double& x : w) total += (x = g(eng));
    if (total <= 0) return std::vector<double>(k, 1.0 / k);
    for (double& x : w) x /= total;
    return w;
}

Leaf draw_leaf(const GenSpec& spec, rng::Key key) {
    switch (spec.leaf_kind) {
        case LeafKind::Bernoulli:
            return bernoulli(0.05 + 0.9 * key.uniform(0));
        case LeafKind::Gaussian:
            return gaussian(-5.0 + 10.0 * key.uniform(0), 0.5 + 1.5 * key.uniform(1));
        case LeafKind::Categorical:
            return categorical(dirichlet(spec.cat_m, 1.0, key));
        default:
            throw DomainError("generator does not produce this leaf kind");
    }
}

int add_region(std::vector<VarId> scope, ScopePartitionTree& tree, rng::Key pkey) {
    int idx = int(tree.nodes.size());
    tree.nodes.push_back({scope, {}});
    if (scope.size() > 1) {
        std::vector<VarId> pool = scope;
        std::shuffle(pool.begin(), pool.end(), pkey.child(std::uint64_t(idx)).engine());
        std::vector<VarId> left(pool.begin(), pool.begin() + pool.size() / 2);
        std::vector<VarId> right(pool.begin() + pool.size() / 2, pool.end());
        std::sort(left.begin(), left.end());
        std::sort(right.begin(), right.end());
        int l = add_region(std::move(left), tree, pkey);
        int r = add_region(std::move(right), tree, pkey);
        tree.nodes[idx].children = {l, r};
    }
    return idx;
}

// Emits the region's component sums bottom-up; the root region gets one.
std::vector<int> emit_region(const GenSpec& spec, const ScopePartitionTree& tree, int region,
                             bool is_root, rng::Key side_key, Circuit& c) {
    const auto& pn = tree.nodes[region];
    const rng::Key rkey = side_key.child(0x52).child(std::uint64_t(region));
    const int nsums = is_root ? 1 : spec.k;
    std::vector<int> sums;
    sums.reserve(nsums);

    if (pn.children.empty()) {
        const VarId var = pn.scope[0];
        for (int j = 0; j < nsums; ++j) {
            std::vector<int> kids(spec.k);
            for (int t = 0; t < spec.k; ++t) {
                kids[t] = int(c.nodes.size());
                c.nodes.push_back(
                    input_node(var, draw_leaf(spec, rkey.child(0x4C).child(j).child(t))));
            }
            if (is_root && spec.k == 1) {
                sums.push_back(kids[0]);  // a lone leaf needs no mixture on top
                continue;
            }
            sums.push_back(int(c.nodes.size()));
            c.nodes.push_back(sum_node(std::move(kids), dirichlet(spec.k, spec.weight_alpha,
                                                                  rkey.child(0x57).child(j))));
        }
        return sums;
    }

    auto left = emit_region(spec, tree, pn.children[0], false, side_key, c);
    auto right = emit_region(spec, tree, pn.children[1], false, side_key, c);
    for (int j = 0; j < nsums; ++j) {
        std::vector<int> prods(spec.k);
        for (int u = 0; u < spec.k; ++u) {
            prods[u] = int(c.nodes.size());
            c.nodes.push_back(product_node({left[u], right[u]}));
        }
        sums.push_back(int(c.nodes.size()));
        c.nodes.push_back(sum_node(std::move(prods), dirichlet(spec.k, spec.weight_alpha,
                                                               rkey.child(0x57).child(j))));
    }
    return sums;
}

} // namespace

GeneratedPair generate_pair(const GenSpec& spec) {
    if (spec.v < 1 || spec.k < 1) throw DomainError("generator needs v >= 1 and k >= 1");
    if (spec.leaf_kind == LeafKind::Categorical && spec.cat_m < 2)
        throw DomainError("categorical support needs at least two values");

    const rng::Key root{spec.seed};
    GeneratedPair out;

    std::vector<VarId> all(spec.v);
    for (int i = 0; i < spec.v; ++i) all[i] = i;
    out.partition.root = add_region(std::move(all), out.partition, root.child(0x50));

    for (int side = 0; side < 2; ++side) {
        Circuit& c = side == 0 ? out.p : out.q;
        c.num_vars = spec.v;
        c.root = emit_region(spec, out.partition, out.partition.root, true,
                             root.child(0x43).child(side), c)[0];
    }
    return out;
}

} // namespace pcot
