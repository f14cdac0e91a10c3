#include "pcot/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pcot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int support_point(double x, int m, const char* what) {
    double r = std::round(x);
    if (std::abs(x - r) > 1e-9 || r < 0 || r >= m)
        throw DomainError(std::string(what) + ": value " + std::to_string(x) + " outside support of size " +
                          std::to_string(m));
    return int(r);
}

// Joint mass/density of a pair leaf at (xv, yv). A degenerate (affine-map)
// pair carries all mass on the line y = a*x + b; off the line it is zero and
// on it we report the X-marginal density.
double pair_density(const Node& nd, double xv, double yv) {
    if (nd.plan.kind == OTPlan::Kind::DiscreteJoint) {
        int xi = support_point(xv, int(nd.plan.table.size()), "pair input x");
        int yi = support_point(yv, int(nd.plan.table[0].size()), "pair input y");
        return nd.plan.table[xi][yi];
    }
    double mapped = nd.plan.a * xv + nd.plan.b;
    if (std::abs(yv - mapped) > 1e-9 * std::max(1.0, std::abs(mapped))) return 0.0;
    return nd.leaf.density(xv);
}

double pair_marginal(const Node& nd, double v, bool x_side) {
    if (nd.plan.kind == OTPlan::Kind::AffineMap) return (x_side ? nd.leaf : nd.y_leaf).density(v);
    const auto& t = nd.plan.table;
    if (x_side) {
        int xi = support_point(v, int(t.size()), "pair input x");
        double s = 0;
        for (double m : t[xi]) s += m;
        return s;
    }
    int yi = support_point(v, int(t[0].size()), "pair input y");
    double s = 0;
    for (const auto& row : t) s += row[yi];
    return s;
}

template <bool kLog>
double eval_pass(const Circuit& c, const std::vector<double>& x, const std::vector<char>* given) {
    if (x.size() != size_t(c.num_vars))
        throw LengthMismatchError("assignment has " + std::to_string(x.size()) + " values for " +
                                  std::to_string(c.num_vars) + " variables");
    auto assigned = [&](VarId v) { return given == nullptr || (*given)[v]; };

    std::vector<double> val(c.nodes.size());
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        double lin = 0;
        switch (nd.type) {
            case NodeType::Input:
                lin = assigned(nd.var) ? nd.leaf.density(x[nd.var]) : 1.0;
                val[i] = kLog ? (lin > 0 ? std::log(lin) : kNegInf) : lin;
                continue;
            case NodeType::PairInput: {
                bool ax = assigned(nd.var), ay = assigned(nd.y_var);
                if (ax && ay) lin = pair_density(nd, x[nd.var], x[nd.y_var]);
                else if (ax) lin = pair_marginal(nd, x[nd.var], true);
                else if (ay) lin = pair_marginal(nd, x[nd.y_var], false);
                else lin = 1.0;
                val[i] = kLog ? (lin > 0 ? std::log(lin) : kNegInf) : lin;
                continue;
            }
            case NodeType::Product: {
                if constexpr (kLog) {
                    double s = 0;
                    for (int ch : nd.children) s += val[ch];
                    val[i] = s;
                } else {
                    double s = 1;
                    for (int ch : nd.children) s *= val[ch];
                    val[i] = s;
                }
                continue;
            }
            case NodeType::Sum: {
                if constexpr (kLog) {
                    double hi = kNegInf;
                    for (size_t j = 0; j < nd.children.size(); ++j)
                        if (nd.weights[j] > 0) hi = std::max(hi, std::log(nd.weights[j]) + val[nd.children[j]]);
                    if (hi == kNegInf) {
                        val[i] = kNegInf;
                        continue;
                    }
                    double acc = 0;
                    for (size_t j = 0; j < nd.children.size(); ++j)
                        if (nd.weights[j] > 0) acc += std::exp(std::log(nd.weights[j]) + val[nd.children[j]] - hi);
                    val[i] = hi + std::log(acc);
                } else {
                    double s = 0;
                    for (size_t j = 0; j < nd.children.size(); ++j) s += nd.weights[j] * val[nd.children[j]];
                    val[i] = s;
                }
                continue;
            }
        }
    }
    return val[c.root];
}

} // namespace

double evaluate(const Circuit& c, const std::vector<double>& x) { return eval_pass<false>(c, x, nullptr); }

double log_evaluate(const Circuit& c, const std::vector<double>& x) { return eval_pass<true>(c, x, nullptr); }

double marginal(const Circuit& c, const std::vector<double>& x, const std::vector<char>& given) {
    if (given.size() != size_t(c.num_vars)) throw LengthMismatchError("evidence mask length mismatch");
    return eval_pass<false>(c, x, &given);
}

double log_marginal(const Circuit& c, const std::vector<double>& x, const std::vector<char>& given) {
    if (given.size() != size_t(c.num_vars)) throw LengthMismatchError("evidence mask length mismatch");
    return eval_pass<true>(c, x, &given);
}

namespace {

double draw_from_pmf(const std::vector<double>& pmf, double u) {
    double acc = 0;
    for (size_t i = 0; i + 1 < pmf.size(); ++i) {
        acc += pmf[i];
        if (u < acc) return double(i);
    }
    return double(pmf.size() - 1);
}

} // namespace

std::vector<double> sample(const Circuit& c, rng::Key key) {
    auto eng = key.engine();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(c.num_vars, 0.0);

    // Explicit DFS; children of products are visited left to right so the
    // draw sequence is a pure function of the key.
    std::vector<int> stack = {c.root};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        const Node& nd = c.nodes[id];
        switch (nd.type) {
            case NodeType::Sum: {
                double u = unif(eng), acc = 0;
                int pick = int(nd.children.size()) - 1;
                for (size_t j = 0; j + 1 < nd.children.size(); ++j) {
                    acc += nd.weights[j];
                    if (u < acc) {
                        pick = int(j);
                        break;
                    }
                }
                stack.push_back(nd.children[pick]);
                break;
            }
            case NodeType::Product:
                for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) stack.push_back(*it);
                break;
            case NodeType::Input:
                switch (nd.leaf.kind) {
                    case LeafKind::Bernoulli: out[nd.var] = unif(eng) < nd.leaf.p ? 1.0 : 0.0; break;
                    case LeafKind::Categorical: out[nd.var] = draw_from_pmf(nd.leaf.probs, unif(eng)); break;
                    case LeafKind::Gaussian: out[nd.var] = nd.leaf.mu + nd.leaf.sigma * normal(eng); break;
                    case LeafKind::Dirac: out[nd.var] = nd.leaf.value; break;
                }
                break;
            case NodeType::PairInput:
                if (nd.plan.kind == OTPlan::Kind::DiscreteJoint) {
                    const auto& t = nd.plan.table;
                    double u = unif(eng), acc = 0;
                    int xi = int(t.size()) - 1, yi = int(t[0].size()) - 1;
                    bool done = false;
                    for (size_t a = 0; a < t.size() && !done; ++a)
                        for (size_t b = 0; b < t[a].size() && !done; ++b) {
                            acc += t[a][b];
                            if (u < acc) {
                                xi = int(a);
                                yi = int(b);
                                done = true;
                            }
                        }
                    out[nd.var] = double(xi);
                    out[nd.y_var] = double(yi);
                } else {
                    double xv = nd.leaf.mu + nd.leaf.sigma * normal(eng);
                    out[nd.var] = xv;
                    out[nd.y_var] = nd.plan.a * xv + nd.plan.b;
                }
                break;
        }
    }
    return out;
}

std::vector<std::vector<double>> sample_n(const Circuit& c, int n, rng::Key key) {
    std::vector<std::vector<double>> out(n);
    for (int i = 0; i < n; ++i) out[i] = sample(c, key.child(i));
    return out;
}

std::vector<double> conditional_expectation(const Circuit& c, const std::vector<double>& x,
                                            const std::vector<char>& given) {
    if (x.size() != size_t(c.num_vars) || given.size() != size_t(c.num_vars))
        throw LengthMismatchError("assignment/mask length mismatch");

    const size_t n = c.nodes.size();
    // Per node: log-likelihood of in-scope evidence and conditional means of
    // in-scope free variables (normalized at sums to stay stable).
    std::vector<double> ll(n, 0.0);
    std::vector<std::vector<double>> mean(n);
    for (auto& m : mean) m.assign(c.num_vars, 0.0);

    for (size_t i = 0; i < n; ++i) {
        const Node& nd = c.nodes[i];
        switch (nd.type) {
            case NodeType::Input:
                if (given[nd.var]) {
                    ll[i] = nd.leaf.log_density(x[nd.var]);
                } else {
                    mean[i][nd.var] = nd.leaf.mean();
                }
                break;
            case NodeType::PairInput: {
                bool ax = given[nd.var], ay = given[nd.y_var];
                if (ax && ay) {
                    double d = pair_density(nd, x[nd.var], x[nd.y_var]);
                    ll[i] = d > 0 ? std::log(d) : kNegInf;
                } else if (!ax && !ay) {
                    mean[i][nd.var] = nd.leaf.mean();
                    mean[i][nd.y_var] = nd.y_leaf.mean();
                } else {
                    // conditional of one side given the other
                    bool x_given = ax;
                    double gv = x_given ? x[nd.var] : x[nd.y_var];
                    VarId free_var = x_given ? nd.y_var : nd.var;
                    if (nd.plan.kind == OTPlan::Kind::AffineMap) {
                        ll[i] = (x_given ? nd.leaf : nd.y_leaf).log_density(gv);
                        mean[i][free_var] =
                            x_given ? nd.plan.a * gv + nd.plan.b : (gv - nd.plan.b) / nd.plan.a;
                    } else {
                        const auto& t = nd.plan.table;
                        double mass = 0, mom = 0;
                        if (x_given) {
                            int xi = support_point(gv, int(t.size()), "pair input x");
                            for (size_t b = 0; b < t[xi].size(); ++b) {
                                mass += t[xi][b];
                                mom += double(b) * t[xi][b];
                            }
                        } else {
                            int yi = support_point(gv, int(t[0].size()), "pair input y");
                            for (size_t a = 0; a < t.size(); ++a) {
                                mass += t[a][yi];
                                mom += double(a) * t[a][yi];
                            }
                        }
                        ll[i] = mass > 0 ? std::log(mass) : kNegInf;
                        mean[i][free_var] = mass > 0 ? mom / mass : 0.0;
                    }
                }
                break;
            }
            case NodeType::Product: {
                double s = 0;
                for (int ch : nd.children) {
                    s += ll[ch];
                    for (int v = 0; v < c.num_vars; ++v) mean[i][v] += mean[ch][v];
                }
                ll[i] = s;
                break;
            }
            case NodeType::Sum: {
                double hi = kNegInf;
                for (size_t j = 0; j < nd.children.size(); ++j)
                    if (nd.weights[j] > 0) hi = std::max(hi, std::log(nd.weights[j]) + ll[nd.children[j]]);
                if (hi == kNegInf) {
                    ll[i] = kNegInf;
                    break;
                }
                double z = 0;
                for (size_t j = 0; j < nd.children.size(); ++j) {
                    if (nd.weights[j] <= 0) continue;
                    double w = std::exp(std::log(nd.weights[j]) + ll[nd.children[j]] - hi);
                    z += w;
                    for (int v = 0; v < c.num_vars; ++v) mean[i][v] += w * mean[nd.children[j]][v];
                }
                for (int v = 0; v < c.num_vars; ++v) mean[i][v] /= z;
                ll[i] = hi + std::log(z);
                break;
            }
        }
    }

    if (ll[c.root] == kNegInf || ll[c.root] < std::log(1e-300))
        throw ZeroEvidenceError("evidence has zero likelihood under the circuit");

    std::vector<double> out = mean[c.root];
    for (int v = 0; v < c.num_vars; ++v)
        if (given[v]) out[v] = x[v];
    return out;
}

} // namespace pcot
