#include "pcot/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcot/inference.hpp"
#include "pcot/leaf_ot.hpp"
#include "pcot/parallel.hpp"
#include "pcot/sinkhorn.hpp"

namespace pcot {

namespace {

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

} // namespace

double unroll_count(const Circuit& c) {
    validate(c);
    std::vector<double> cnt(c.nodes.size(), 1.0);
    // ids are topological, so one forward pass covers the DAG
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Sum) {
            double s = 0;
            for (int ch : nd.children) s += cnt[ch];
            cnt[i] = s;
        } else if (nd.type == NodeType::Product) {
            double s = 1;
            for (int ch : nd.children) s *= cnt[ch];
            cnt[i] = s;
        }
    }
    return cnt[c.root];
}

MixtureForm unroll(const Circuit& c, double cap) {
    double total = unroll_count(c);
    if (total > cap)
        throw TooLargeError("unroll would produce " + std::to_string(total) + " components (cap " +
                            std::to_string(cap) + ")");
    if (compute_scopes(c)[c.root].size() != size_t(c.num_vars))
        throw DomainError("circuit scope does not cover every variable");

    MixtureForm m;
    m.num_vars = c.num_vars;

    std::vector<int> pool_of(c.nodes.size(), -1);
    for (size_t i = 0; i < c.nodes.size(); ++i)
        if (c.nodes[i].type == NodeType::Input) {
            pool_of[i] = int(m.leaves.size());
            m.leaves.push_back(c.nodes[i].leaf);
        }

    // Per node: component list as (weight, factor vector over the node's
    // scope, unset vars = -1). Counts only grow toward the root, so every
    // intermediate list stays under the cap too.
    struct Comp {
        double w;
        std::vector<int> f;
    };
    std::vector<std::vector<Comp>> comps(c.nodes.size());
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Input) {
            Comp one{1.0, std::vector<int>(c.num_vars, -1)};
            one.f[nd.var] = pool_of[i];
            comps[i] = {std::move(one)};
        } else if (nd.type == NodeType::Sum) {
            std::vector<Comp> out;
            for (size_t ci = 0; ci < nd.children.size(); ++ci)
                for (const Comp& ch : comps[nd.children[ci]]) {
                    out.push_back(ch);
                    out.back().w *= nd.weights[ci];
                }
            comps[i] = std::move(out);
        } else {
            std::vector<Comp> out = {{1.0, std::vector<int>(c.num_vars, -1)}};
            for (int chn : nd.children) {
                std::vector<Comp> next;
                next.reserve(out.size() * comps[chn].size());
                for (const Comp& a : out)
                    for (const Comp& b : comps[chn]) {
                        Comp merged = a;
                        merged.w *= b.w;
                        for (int v = 0; v < c.num_vars; ++v)
                            if (b.f[v] != -1) merged.f[v] = b.f[v];
                        next.push_back(std::move(merged));
                    }
                out = std::move(next);
            }
            comps[i] = std::move(out);
        }
    }

    for (Comp& comp : comps[c.root]) {
        m.weights.push_back(comp.w);
        m.factors.push_back(std::move(comp.f));
    }
    return m;
}

double mixture_evaluate(const MixtureForm& m, const std::vector<double>& x) {
    if (int(x.size()) != m.num_vars) throw LengthMismatchError("assignment length != num_vars");
    double total = 0;
    for (size_t c = 0; c < m.weights.size(); ++c) {
        double prod = m.weights[c];
        for (int v = 0; v < m.num_vars && prod != 0; ++v) prod *= m.leaves[m.factors[c][v]].density(x[v]);
        total += prod;
    }
    return total;
}

DistanceResult mixture_wasserstein(const MixtureForm& p, const MixtureForm& q, int p_order) {
    if (p.num_vars != q.num_vars) throw LengthMismatchError("mixtures cover different variable counts");
    const size_t cp = p.weights.size(), cq = q.weights.size();

    // Leaf pairs repeat across components, so distances go through a pool
    // LUT. Only same-variable pairs are ever needed; computing the full
    // cross product would trip UnsupportedPairError on kind mismatches.
    std::vector<std::vector<double>> lut(p.leaves.size(),
                                         std::vector<double>(q.leaves.size(),
                                                             std::numeric_limits<double>::quiet_NaN()));
    for (int v = 0; v < p.num_vars; ++v) {
        std::vector<char> pa(p.leaves.size(), 0), qb(q.leaves.size(), 0);
        for (size_t c = 0; c < cp; ++c) pa[p.factors[c][v]] = 1;
        for (size_t c = 0; c < cq; ++c) qb[q.factors[c][v]] = 1;
        for (size_t a = 0; a < pa.size(); ++a)
            if (pa[a])
                for (size_t b = 0; b < qb.size(); ++b)
                    if (qb[b] && std::isnan(lut[a][b]))
                        lut[a][b] = leaf_wasserstein_cost(p.leaves[a], q.leaves[b], p_order);
    }

    std::vector<std::vector<double>> cost(cp, std::vector<double>(cq));
    const bool par = parallel::enabled() && cp > 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (size_t i = 0; i < cp; ++i) {
        const std::vector<int>& fi = p.factors[i];
        for (size_t j = 0; j < cq; ++j) {
            const std::vector<int>& fj = q.factors[j];
            double s = 0;
            for (int v = 0; v < p.num_vars; ++v) s += lut[fi[v]][fj[v]];
            cost[i][j] = s;
        }
    }
    (void)par;

    TransportPlan tp = solve_transportation(p.weights, q.weights, cost);
    return {tp.objective, std::move(tp)};
}

namespace {

// Per-variable discrete support size: the widest input node on that
// variable. Continuous leaves have no finite support to enumerate.
std::vector<int> support_sizes(const Circuit& c) {
    std::vector<int> sup(c.num_vars, 0);
    for (const Node& nd : c.nodes)
        if (nd.type == NodeType::Input) {
            int s = nd.leaf.support();
            if (s < 0)
                throw DomainError("exact enumeration requires discrete circuits");
            sup[nd.var] = std::max(sup[nd.var], s);
        }
    for (int v = 0; v < c.num_vars; ++v)
        if (sup[v] == 0) throw DomainError("variable " + std::to_string(v) + " has no input node");
    return sup;
}

// All assignments in lexicographic order, variable 0 outermost, with their
// probabilities.
std::vector<double> enumerate_masses(const Circuit& c, const std::vector<int>& sup, double total,
                                     std::vector<std::vector<double>>& assignments) {
    std::vector<double> mass;
    mass.reserve(size_t(total));
    assignments.reserve(size_t(total));
    std::vector<double> x(c.num_vars, 0.0);
    while (true) {
        mass.push_back(evaluate(c, x));
        assignments.push_back(x);
        int v = c.num_vars - 1;
        while (v >= 0 && x[v] + 1 >= sup[v]) x[v--] = 0;
        if (v < 0) break;
        x[v] += 1;
    }
    return mass;
}

} // namespace

DistanceResult exact_wasserstein(const Circuit& p, const Circuit& q, int p_order) {
    if (p_order < 1) throw DomainError("order p must be >= 1");
    if (p.num_vars != q.num_vars) throw LengthMismatchError("circuits cover different variable counts");
    std::vector<int> sup_p = support_sizes(p), sup_q = support_sizes(q);
    double np = 1, nq = 1;
    for (int s : sup_p) np *= s;
    for (int s : sup_q) nq *= s;
    if (np * nq > double(1 << 16))
        throw TooLargeError("joint support " + std::to_string(np * nq) + " exceeds 2^16 cells");

    std::vector<std::vector<double>> xs, ys;
    std::vector<double> pm = enumerate_masses(p, sup_p, np, xs);
    std::vector<double> qm = enumerate_masses(q, sup_q, nq, ys);

    std::vector<std::vector<double>> cost(pm.size(), std::vector<double>(qm.size()));
    for (size_t i = 0; i < pm.size(); ++i)
        for (size_t j = 0; j < qm.size(); ++j) {
            double s = 0;
            for (int v = 0; v < p.num_vars; ++v) s += ipow(std::abs(xs[i][v] - ys[j][v]), p_order);
            cost[i][j] = s;
        }

    TransportPlan tp = solve_transportation(pm, qm, cost);
    return {tp.objective, std::move(tp)};
}

double sinkhorn_between_circuits(const Circuit& p, const Circuit& q, int p_order, int n,
                                 double epsilon, std::uint64_t seed) {
    if (p_order < 1) throw DomainError("order p must be >= 1");
    if (p.num_vars != q.num_vars) throw LengthMismatchError("circuits cover different variable counts");
    if (n < 1) throw DomainError("sample count must be >= 1");

    rng::Key root{seed};
    auto xs = sample_n(p, n, root.child(0x50));
    auto ys = sample_n(q, n, root.child(0x51));

    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (int v = 0; v < p.num_vars; ++v) s += ipow(std::abs(xs[i][v] - ys[j][v]), p_order);
            cost[i][j] = s;
        }

    std::vector<double> w(n, 1.0 / n);
    return sinkhorn(w, w, cost, epsilon).objective;
}

double kendall_tau(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw LengthMismatchError("rankings differ in length");
    const size_t n = a.size();
    if (n < 2) throw LengthMismatchError("rankings need at least two entries");

    long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            double da = a[i] - a[j], db = b[i] - b[j];
            if (da == 0 && db == 0) continue;
            if (da == 0) {
                ++ties_a;
            } else if (db == 0) {
                ++ties_b;
            } else if ((da > 0) == (db > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    double n0 = double(n) * (n - 1) / 2.0;
    // pairs tied in both count toward neither adjustment term
    long long both = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (a[i] == a[j] && b[i] == b[j]) ++both;
    double n1 = double(ties_a + both), n2 = double(ties_b + both);
    double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (denom == 0) return 0.0;
    return double(concordant - discordant) / denom;
}

} // namespace pcot
