#include "pcot/wm.hpp"

#include <algorithm>
#include <cmath>

#include "pcot/inference.hpp"
#include "pcot/parallel.hpp"
#include "pcot/rng.hpp"

namespace pcot {

namespace {

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

double leaf_expected_distance(const Leaf& l, double d, int p) {
    switch (l.kind) {
        case LeafKind::Gaussian:
            if (p != 2) throw UnsupportedPairError("Gaussian expected distance needs p=2");
            return (l.mu - d) * (l.mu - d) + l.sigma * l.sigma;
        case LeafKind::Dirac:
            return ipow(std::abs(l.value - d), p);
        default: {
            const int m = l.support();
            if (d != std::floor(d) || d < 0 || d >= m)
                throw DomainError("datapoint value " + std::to_string(d) + " outside discrete support");
            double s = 0;
            if (l.kind == LeafKind::Bernoulli) {
                s = (1.0 - l.p) * ipow(d, p) + l.p * ipow(std::abs(1.0 - d), p);
            } else {
                for (int x = 0; x < m; ++x) s += l.probs[x] * ipow(std::abs(x - d), p);
            }
            return s;
        }
    }
    return 0;
}

void cache_column(const Circuit& c, const std::vector<double>& d, int p, int k, DistanceCache& out) {
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        double v = 0;
        switch (nd.type) {
            case NodeType::Input:
                v = leaf_expected_distance(nd.leaf, d[nd.var], p);
                break;
            case NodeType::Product:
                for (int ch : nd.children) v += out.at(ch, k);
                break;
            case NodeType::Sum:
                for (size_t ci = 0; ci < nd.children.size(); ++ci)
                    v += nd.weights[ci] * out.at(nd.children[ci], k);
                break;
            default:
                throw DomainError("pair-input nodes have no expected-distance semantics");
        }
        out.at(int(i), k) = v;
    }
}

int argmin_child(const Node& sum, const DistanceCache& cache, int k) {
    int best = 0;
    double bv = cache.at(sum.children[0], k);
    for (size_t ci = 1; ci < sum.children.size(); ++ci) {
        double v = cache.at(sum.children[ci], k);
        if (v < bv) {
            bv = v;
            best = int(ci);
        }
    }
    return best;
}

} // namespace

DistanceCache inference_pass(const Circuit& c, const Dataset& data, int p_order) {
    if (p_order < 1) throw DomainError("order p must be >= 1");
    validate(c);
    const int n = int(data.size());
    if (n == 0) throw DomainError("empty dataset");
    for (const auto& row : data)
        if (int(row.size()) != c.num_vars)
            throw LengthMismatchError("datapoint width != circuit variable count");

    DistanceCache cache;
    cache.num_nodes = int(c.nodes.size());
    cache.num_points = n;
    cache.table.resize(size_t(cache.num_nodes) * n);

    const bool par = parallel::enabled() && n > 1;
    parallel::ExceptionGate gate;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (int k = 0; k < n; ++k)
        gate.run([&] { cache_column(c, data[k], p_order, k, cache); });
    (void)par;
    gate.rethrow();
    return cache;
}

std::pair<Circuit, RoutingTable> learn_pass(const Circuit& c, const Dataset& data,
                                            const DistanceCache& cache, const WMConfig& cfg,
                                            int iteration) {
    const int n = int(data.size());
    if (cache.num_nodes != int(c.nodes.size()) || cache.num_points != n)
        throw LengthMismatchError("cache shape does not match circuit and data");

    RoutingTable rt;
    std::vector<int> sum_slot(c.nodes.size(), -1);
    for (size_t i = 0; i < c.nodes.size(); ++i)
        if (c.nodes[i].type == NodeType::Sum) {
            sum_slot[i] = int(rt.sum_nodes.size());
            rt.sum_nodes.push_back(int(i));
        }
    rt.choice.assign(rt.sum_nodes.size(), std::vector<int>(n, -1));
    rt.arrived.assign(rt.sum_nodes.size(), 0);

    // Top-down routing; ids are topological, so descending order visits
    // every parent before its children. Points are independent columns.
    std::vector<char> reach(c.nodes.size() * size_t(n), 0);
    const rng::Key route_key = rng::Key{cfg.seed}.child(0x524F5554).child(std::uint64_t(iteration));
    const bool par = parallel::enabled() && n > 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par)
#endif
    for (int k = 0; k < n; ++k) {
        char* rk = reach.data() + size_t(k) * c.nodes.size();
        rk[c.root] = 1;
        for (int i = int(c.nodes.size()) - 1; i >= 0; --i) {
            if (!rk[i]) continue;
            const Node& nd = c.nodes[i];
            if (nd.type == NodeType::Product) {
                for (int ch : nd.children) rk[ch] = 1;
            } else if (nd.type == NodeType::Sum) {
                int pick;
                const int nc = int(nd.children.size());
                rng::Key pk = route_key.child(std::uint64_t(i)).child(std::uint64_t(k));
                if (cfg.stochastic_p > 0 && pk.uniform(0) < cfg.stochastic_p) {
                    pick = std::min(nc - 1, int(pk.uniform(1) * nc));
                } else {
                    pick = argmin_child(nd, cache, k);
                }
                rt.choice[sum_slot[i]][k] = pick;
                rk[nd.children[pick]] = 1;
            }
        }
    }
    (void)par;

    Circuit out = c;

    // Weight update: routed fractions, with floor-and-renormalize for
    // children no point chose. A sum nothing reached keeps its parameters.
    for (size_t s = 0; s < rt.sum_nodes.size(); ++s) {
        Node& nd = out.nodes[rt.sum_nodes[s]];
        std::vector<int> counts(nd.children.size(), 0);
        int arrived = 0;
        for (int k = 0; k < n; ++k)
            if (rt.choice[s][k] >= 0) {
                ++counts[rt.choice[s][k]];
                ++arrived;
            }
        rt.arrived[s] = arrived;
        if (arrived == 0) continue;
        double total = 0;
        for (size_t ci = 0; ci < counts.size(); ++ci) {
            double w = counts[ci] > 0 ? double(counts[ci]) / arrived : cfg.prob_floor;
            if (counts[ci] == 0) ++rt.empty_routes;
            nd.weights[ci] = w;
            total += w;
        }
        for (double& w : nd.weights) w /= total;
    }

    // Leaf refit to the empirical distribution of the points that reached
    // each leaf; untouched leaves keep their parameters.
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        Node& nd = out.nodes[i];
        if (nd.type != NodeType::Input || nd.leaf.kind == LeafKind::Dirac) continue;
        double m = 0, sx = 0, sxx = 0;
        std::vector<double> freq;
        if (nd.leaf.discrete()) freq.assign(nd.leaf.support(), 0.0);
        for (int k = 0; k < n; ++k) {
            if (!reach[size_t(k) * c.nodes.size() + i]) continue;
            double d = data[k][nd.var];
            m += 1;
            sx += d;
            sxx += d * d;
            if (!freq.empty()) freq[size_t(d)] += 1;
        }
        if (m == 0) continue;
        if (nd.leaf.kind == LeafKind::Gaussian) {
            double mu = sx / m;
            double var = std::max(0.0, sxx / m - mu * mu);
            nd.leaf.mu = mu;
            nd.leaf.sigma = std::max(cfg.sigma_floor, std::sqrt(var));
        } else if (nd.leaf.kind == LeafKind::Bernoulli) {
            nd.leaf.p = std::clamp(freq[1] / m, cfg.prob_floor, 1.0 - cfg.prob_floor);
        } else {
            double total = 0;
            for (double& f : freq) {
                f = std::max(f / m, cfg.prob_floor);
                total += f;
            }
            for (double& f : freq) f /= total;
            nd.leaf.probs = freq;
        }
    }

    return {std::move(out), std::move(rt)};
}

double ecw(const Circuit& c, const Dataset& data, int p_order) {
    DistanceCache cache = inference_pass(c, data, p_order);
    const int n = int(data.size());
    std::vector<double> routed(c.nodes.size());
    double total = 0;
    for (int k = 0; k < n; ++k) {
        for (size_t i = 0; i < c.nodes.size(); ++i) {
            const Node& nd = c.nodes[i];
            if (nd.type == NodeType::Input) {
                routed[i] = cache.at(int(i), k);
            } else if (nd.type == NodeType::Product) {
                double s = 0;
                for (int ch : nd.children) s += routed[ch];
                routed[i] = s;
            } else {
                routed[i] = routed[nd.children[argmin_child(nd, cache, k)]];
            }
        }
        total += routed[c.root];
    }
    return total / n;
}

WMResult fit_wm(const Circuit& c, const Dataset& data, const WMConfig& cfg) {
    WMResult res;
    res.circuit = c;
    res.trace.push_back(ecw(res.circuit, data, cfg.p_order));
    for (int it = 0; it < cfg.max_iters; ++it) {
        DistanceCache cache = inference_pass(res.circuit, data, cfg.p_order);
        res.circuit = learn_pass(res.circuit, data, cache, cfg, it).first;
        double e = ecw(res.circuit, data, cfg.p_order);
        double prev = res.trace.back();
        res.trace.push_back(e);
        if (prev - e < cfg.rel_tol * std::max(std::abs(prev), 1e-30)) break;
    }
    return res;
}

double bits_per_dimension(const Circuit& c, const Dataset& data) {
    if (data.empty()) throw DomainError("empty dataset");
    double total = 0;
    for (const auto& row : data) {
        double ll = log_evaluate(c, row);
        if (!std::isfinite(ll))
            throw ZeroLikelihoodError("datapoint has zero likelihood under the circuit");
        total += ll;
    }
    return -total / (double(data.size()) * c.num_vars * std::log(2.0));
}

} // namespace pcot
