#include "pcot/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace pcot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void upward(const Circuit& c, const std::vector<double>& d, std::vector<double>& lv) {
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Input) {
            lv[i] = nd.leaf.log_density(d[nd.var]);
        } else if (nd.type == NodeType::Product) {
            double s = 0;
            for (int ch : nd.children) s += lv[ch];
            lv[i] = s;
        } else {
            double mx = kNegInf;
            for (size_t ci = 0; ci < nd.children.size(); ++ci)
                if (nd.weights[ci] > 0)
                    mx = std::max(mx, std::log(nd.weights[ci]) + lv[nd.children[ci]]);
            if (mx == kNegInf) {
                lv[i] = kNegInf;
                continue;
            }
            double s = 0;
            for (size_t ci = 0; ci < nd.children.size(); ++ci)
                if (nd.weights[ci] > 0) s += std::exp(std::log(nd.weights[ci]) + lv[nd.children[ci]] - mx);
            lv[i] = mx + std::log(s);
        }
    }
}

} // namespace

Circuit fit_em(const Circuit& c, const Dataset& data, int iters, std::uint64_t seed) {
    (void)seed;
    validate(c);
    if (data.empty()) throw DomainError("empty dataset");
    for (const auto& row : data)
        if (int(row.size()) != c.num_vars)
            throw LengthMismatchError("datapoint width != circuit variable count");

    Circuit cur = c;
    const size_t nn = c.nodes.size();

    for (int it = 0; it < iters; ++it) {
        std::vector<std::vector<double>> edge(nn);
        for (size_t i = 0; i < nn; ++i)
            if (cur.nodes[i].type == NodeType::Sum) edge[i].assign(cur.nodes[i].children.size(), 0.0);
        std::vector<double> wsum(nn, 0.0), sx(nn, 0.0), sxx(nn, 0.0);
        std::vector<std::vector<double>> freq(nn);
        for (size_t i = 0; i < nn; ++i)
            if (cur.nodes[i].type == NodeType::Input && cur.nodes[i].leaf.discrete())
                freq[i].assign(cur.nodes[i].leaf.support(), 0.0);

        std::vector<double> lv(nn), flow(nn);
        for (const auto& d : data) {
            upward(cur, d, lv);
            if (lv[cur.root] == kNegInf) continue;  // no posterior to speak of
            std::fill(flow.begin(), flow.end(), 0.0);
            flow[cur.root] = 1.0;
            for (int i = int(nn) - 1; i >= 0; --i) {
                const double f = flow[i];
                if (f <= 0) continue;
                const Node& nd = cur.nodes[i];
                if (nd.type == NodeType::Product) {
                    for (int ch : nd.children) flow[ch] += f;
                } else if (nd.type == NodeType::Sum) {
                    for (size_t ci = 0; ci < nd.children.size(); ++ci) {
                        if (nd.weights[ci] <= 0 || lv[nd.children[ci]] == kNegInf) continue;
                        double share =
                            f * std::exp(std::log(nd.weights[ci]) + lv[nd.children[ci]] - lv[i]);
                        edge[i][ci] += share;
                        flow[nd.children[ci]] += share;
                    }
                } else {
                    wsum[i] += f;
                    sx[i] += f * d[nd.var];
                    sxx[i] += f * d[nd.var] * d[nd.var];
                    if (!freq[i].empty()) freq[i][size_t(d[nd.var])] += f;
                }
            }
        }

        for (size_t i = 0; i < nn; ++i) {
            Node& nd = cur.nodes[i];
            if (nd.type == NodeType::Sum) {
                double total = 0;
                for (double e : edge[i]) total += e;
                if (total <= 0) continue;
                for (size_t ci = 0; ci < nd.children.size(); ++ci) nd.weights[ci] = edge[i][ci] / total;
            } else if (nd.type == NodeType::Input && wsum[i] > 0) {
                if (nd.leaf.kind == LeafKind::Gaussian) {
                    double mu = sx[i] / wsum[i];
                    double var = std::max(0.0, sxx[i] / wsum[i] - mu * mu);
                    nd.leaf.mu = mu;
                    nd.leaf.sigma = std::max(kSigmaFloor, std::sqrt(var));
                } else if (nd.leaf.kind == LeafKind::Bernoulli) {
                    nd.leaf.p = std::clamp(sx[i] / wsum[i], kProbFloor, 1.0 - kProbFloor);
                } else if (nd.leaf.kind == LeafKind::Categorical) {
                    double total = 0;
                    for (double& fr : freq[i]) {
                        fr = std::max(fr / wsum[i], kProbFloor);
                        total += fr;
                    }
                    for (double& fr : freq[i]) fr /= total;
                    nd.leaf.probs = freq[i];
                }
            }
        }
    }
    return cur;
}

} // namespace pcot
