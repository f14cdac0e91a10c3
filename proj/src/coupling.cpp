#include "pcot/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include "pcot/inference.hpp"
#include "pcot/leaf_ot.hpp"
#include "pcot/parallel.hpp"
#include "pcot/transportation.hpp"

namespace pcot {

namespace {

double ipow(double x, int p) {
    double r = 1;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

enum class PairCase { Leaf, Product, SumGrid };

// One memoized (p node, q node) pair and everything needed to assemble its
// output node once all child results exist.
struct Pair {
    int pn = -1, qn = -1;
    PairCase pcase = PairCase::Leaf;
    int level = 0;
    // Product: matched child pairs in p-child order. SumGrid: row-major
    // (p child index major) grid of child pairs.
    std::vector<int> children;
    int rows = 0, cols = 0;
    std::vector<double> row_w, col_w;
    // results
    double g = 0.0;
    LeafOT leaf;                 // Leaf case
    std::vector<double> theta;   // SumGrid case, row-major
};

struct Builder {
    const Circuit& p;
    const Circuit& q;
    const Bijection& bij;
    int p_order;
    bool use_parallel;

    std::vector<std::vector<VarId>> scopes_p, scopes_q;
    std::vector<Pair> pairs;
    std::unordered_map<long long, int> memo;  // pn * |Q| + qn -> pair index

    Builder(const Circuit& p_, const Circuit& q_, const Bijection& bij_, int order, bool par)
        : p(p_), q(q_), bij(bij_), p_order(order), use_parallel(par) {
        scopes_p = compute_scopes(p);
        scopes_q = compute_scopes(q);
    }

    long long key(int pn, int qn) const { return (long long)pn * (long long)q.nodes.size() + qn; }

    std::vector<VarId> mapped_scope(int pn) const {
        std::vector<VarId> s;
        s.reserve(scopes_p[pn].size());
        for (VarId v : scopes_p[pn]) s.push_back(bij[v]);
        std::sort(s.begin(), s.end());
        return s;
    }

    // Discovery is a serial DFS so pair indices are schedule-independent.
    int discover(int pn, int qn) {
        auto it = memo.find(key(pn, qn));
        if (it != memo.end()) return it->second;
        int id = int(pairs.size());
        memo.emplace(key(pn, qn), id);
        pairs.push_back(Pair{});
        pairs[id].pn = pn;
        pairs[id].qn = qn;

        const Node& a = p.nodes[pn];
        const Node& b = q.nodes[qn];

        if (a.type == NodeType::Sum || b.type == NodeType::Sum) {
            // Either side that is not a sum acts as a single child of weight 1.
            std::vector<int> rows_c = a.type == NodeType::Sum ? a.children : std::vector<int>{pn};
            std::vector<int> cols_c = b.type == NodeType::Sum ? b.children : std::vector<int>{qn};
            std::vector<double> rw = a.type == NodeType::Sum ? a.weights : std::vector<double>{1.0};
            std::vector<double> cw = b.type == NodeType::Sum ? b.weights : std::vector<double>{1.0};
            std::vector<int> grid;
            grid.reserve(rows_c.size() * cols_c.size());
            for (int ci : rows_c)
                for (int cj : cols_c) grid.push_back(discover(ci, cj));
            Pair& pr = pairs[id];
            pr.pcase = PairCase::SumGrid;
            pr.children = std::move(grid);
            pr.rows = int(rows_c.size());
            pr.cols = int(cols_c.size());
            pr.row_w = std::move(rw);
            pr.col_w = std::move(cw);
        } else if (a.type == NodeType::Product && b.type == NodeType::Product) {
            std::vector<int> kids;
            kids.reserve(a.children.size());
            for (int ca : a.children) {
                auto sa = mapped_scope(ca);
                int match = -1;
                for (int cb : b.children)
                    if (scopes_q[cb] == sa) {
                        match = cb;
                        break;
                    }
                if (match == -1)
                    throw NotCompatibleError("product pair (" + std::to_string(pn) + "," + std::to_string(qn) +
                                             ") has no matching child scope");
                kids.push_back(discover(ca, match));
            }
            Pair& pr = pairs[id];
            pr.pcase = PairCase::Product;
            pr.children = std::move(kids);
        } else if (a.type == NodeType::Product || b.type == NodeType::Product) {
            // A unary product against a leaf: descend through it.
            int child;
            if (a.type == NodeType::Product) {
                if (a.children.size() != 1)
                    throw NotCompatibleError("product node " + std::to_string(pn) +
                                             " pairs with an input node of narrower scope");
                child = discover(a.children[0], qn);
            } else {
                if (b.children.size() != 1)
                    throw NotCompatibleError("product node " + std::to_string(qn) +
                                             " pairs with an input node of narrower scope");
                child = discover(pn, b.children[0]);
            }
            Pair& pr = pairs[id];
            pr.pcase = PairCase::Product;
            pr.children = {child};
        } else {
            if (bij[a.var] != b.var)
                throw NotCompatibleError("input nodes " + std::to_string(pn) + " and " + std::to_string(qn) +
                                         " pair variables " + std::to_string(a.var) + " and " +
                                         std::to_string(b.var) + " outside the bijection");
            pairs[id].pcase = PairCase::Leaf;
        }
        return id;
    }

    void compute_levels() {
        // Children always carry larger indices than their first discoverer,
        // but memo hits break that, so take an explicit post-order.
        std::vector<int> order;
        order.reserve(pairs.size());
        std::vector<char> state(pairs.size(), 0);
        std::vector<int> stack = {0};
        while (!stack.empty()) {
            int id = stack.back();
            if (state[id] == 2) {
                stack.pop_back();
                continue;
            }
            if (state[id] == 0) {
                state[id] = 1;
                for (int ch : pairs[id].children)
                    if (state[ch] == 0) stack.push_back(ch);
            } else {
                state[id] = 2;
                order.push_back(id);
                stack.pop_back();
            }
        }
        for (int id : order) {
            int lvl = 0;
            for (int ch : pairs[id].children) lvl = std::max(lvl, pairs[ch].level + 1);
            pairs[id].level = lvl;
        }
    }

    void solve_pair(Pair& pr) {
        switch (pr.pcase) {
            case PairCase::Leaf:
                pr.leaf = leaf_wasserstein(p.nodes[pr.pn].leaf, q.nodes[pr.qn].leaf, p_order);
                pr.g = pr.leaf.cost;
                return;
            case PairCase::Product: {
                double s = 0;
                for (int ch : pr.children) s += pairs[ch].g;
                pr.g = s;
                return;
            }
            case PairCase::SumGrid: {
                std::vector<std::vector<double>> cost(pr.rows, std::vector<double>(pr.cols));
                for (int i = 0; i < pr.rows; ++i)
                    for (int j = 0; j < pr.cols; ++j) cost[i][j] = pairs[pr.children[i * pr.cols + j]].g;
                TransportPlan tp = solve_transportation(pr.row_w, pr.col_w, cost);
                pr.theta.resize(size_t(pr.rows) * pr.cols);
                for (int i = 0; i < pr.rows; ++i)
                    for (int j = 0; j < pr.cols; ++j) pr.theta[i * pr.cols + j] = tp.plan[i][j];
                pr.g = tp.objective;
                return;
            }
        }
    }

    CouplingCircuit assemble() {
        compute_levels();
        int max_level = 0;
        for (const Pair& pr : pairs) max_level = std::max(max_level, pr.level);
        std::vector<std::vector<int>> by_level(max_level + 1);
        for (size_t i = 0; i < pairs.size(); ++i) by_level[pairs[i].level].push_back(int(i));

        for (auto& level : by_level) {
            // Pairs within one level never depend on each other.
#ifdef _OPENMP
            if (use_parallel && level.size() > 1) {
                parallel::ExceptionGate gate;
#pragma omp parallel for schedule(dynamic, 16)
                for (size_t i = 0; i < level.size(); ++i)
                    gate.run([&] { solve_pair(pairs[level[i]]); });
                gate.rethrow();
                continue;
            }
#endif
            for (int id : level) solve_pair(pairs[id]);
        }

        CouplingCircuit out;
        out.vars_per_side = p.num_vars;
        out.p_order = p_order;
        out.circuit.num_vars = 2 * p.num_vars;
        out.optimal_cost = pairs[0].g;

        std::vector<int> node_of(pairs.size(), -1);
        for (const auto& level : by_level) {
            for (int id : level) {
                Pair& pr = pairs[id];
                int nid = int(out.circuit.nodes.size());
                switch (pr.pcase) {
                    case PairCase::Leaf: {
                        const Node& a = p.nodes[pr.pn];
                        const Node& b = q.nodes[pr.qn];
                        out.circuit.nodes.push_back(pair_input_node(a.var, a.leaf, p.num_vars + b.var,
                                                                    b.leaf, std::move(pr.leaf.plan)));
                        break;
                    }
                    case PairCase::Product: {
                        std::vector<int> kids;
                        kids.reserve(pr.children.size());
                        for (int ch : pr.children) kids.push_back(node_of[ch]);
                        out.circuit.nodes.push_back(product_node(std::move(kids)));
                        break;
                    }
                    case PairCase::SumGrid: {
                        std::vector<int> kids;
                        kids.reserve(pr.children.size());
                        for (int ch : pr.children) kids.push_back(node_of[ch]);
                        out.circuit.nodes.push_back(sum_node(std::move(kids), pr.theta));
                        CouplingCircuit::SumInfo si;
                        si.node = nid;
                        si.rows = pr.rows;
                        si.cols = pr.cols;
                        si.row_w = pr.row_w;
                        si.col_w = pr.col_w;
                        out.sums.push_back(std::move(si));
                        break;
                    }
                }
                node_of[id] = nid;
                out.provenance.emplace_back(pr.pn, pr.qn);
            }
        }
        out.circuit.root = node_of[0];
        return out;
    }
};

CouplingCircuit couple_impl(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order,
                            bool par) {
    if (p_order < 1) throw DomainError("order p must be >= 1");
    auto compat = check_compatible(p, q, bij);
    if (!compat.compatible) throw NotCompatibleError(compat.reason);
    Builder b(p, q, bij, p_order, par);
    b.discover(p.root, q.root);
    return b.assemble();
}

} // namespace

CouplingCircuit couple(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order) {
    return couple_impl(p, q, bij, p_order, parallel::enabled());
}

CouplingCircuit couple_serial(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order) {
    return couple_impl(p, q, bij, p_order, false);
}

namespace {

struct ChildListHash {
    size_t operator()(const std::vector<int>& v) const {
        size_t h = v.size();
        for (int x : v) h = h * 0x9e3779b97f4a7c15ULL + size_t(x) + (h >> 29);
        return h;
    }
};

// Children-list id per node: two internal nodes get the same id iff their
// child lists are elementwise equal — then they are literally the same
// subcircuit and any pair cost involving them coincides. Inputs get -1.
std::vector<int> child_list_ids(const Circuit& c, long long& count) {
    std::unordered_map<std::vector<int>, int, ChildListHash> seen;
    std::vector<int> gid(c.nodes.size(), -1);
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Input) continue;
        gid[i] = seen.emplace(nd.children, int(seen.size())).first->second;
    }
    count = (long long)seen.size();
    return gid;
}

// Second level: class of the children's class vector (inputs stay unique).
// Two sums with the same signature see elementwise cost-identical children,
// so they can share one cost grid even when the child node ids differ.
std::vector<int> child_sig_ids(const Circuit& c, const std::vector<int>& gid, long long& count) {
    std::unordered_map<std::vector<int>, int, ChildListHash> seen;
    std::vector<int> sig(c.nodes.size(), -1);
    std::vector<int> key;
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Input) continue;
        key.clear();
        for (int ch : nd.children) key.push_back(gid[ch] >= 0 ? gid[ch] : -ch - 2);
        sig[i] = seen.emplace(key, int(seen.size())).first->second;
    }
    count = (long long)seen.size();
    return sig;
}

// Cost-only twin of Builder: the same pair decomposition and the same exact
// per-sum solves, but only the scalar cost of each pair is kept. Leaf pairs
// are recomputed rather than memoized (cheaper than hashing them); product
// pairs memoize per structural class, and sum pairs with matching child
// signatures share one cost grid — generated circuits duplicate products
// per sum, so this collapses most of the walk, while couple() cannot merge
// anything because every node pair still needs its own plan.
struct CostWalker {
    const Circuit& p;
    const Circuit& q;
    const Bijection& bij;
    int p_order;

    std::vector<std::vector<VarId>> scopes_p, scopes_q;
    std::vector<int> gid_p, gid_q, sig_p, sig_q;
    long long ngid_q = 0, nsig_q = 0;
    std::unordered_map<long long, double> memo;   // sum / pseudo pairs, by node ids
    std::unordered_map<long long, double> pmemo;  // product pairs, by class ids
    std::unordered_map<long long, std::vector<std::vector<double>>> grids;

    CostWalker(const Circuit& p_, const Circuit& q_, const Bijection& bij_, int order)
        : p(p_), q(q_), bij(bij_), p_order(order) {
        scopes_p = compute_scopes(p);
        scopes_q = compute_scopes(q);
        long long np = 0;
        gid_p = child_list_ids(p, np);
        gid_q = child_list_ids(q, ngid_q);
        sig_p = child_sig_ids(p, gid_p, np);
        sig_q = child_sig_ids(q, gid_q, nsig_q);
    }

    std::vector<VarId> mapped_scope(int pn) const {
        std::vector<VarId> s;
        s.reserve(scopes_p[pn].size());
        for (VarId v : scopes_p[pn]) s.push_back(bij[v]);
        std::sort(s.begin(), s.end());
        return s;
    }

    double run(int pn, int qn) {
        const Node& a = p.nodes[pn];
        const Node& b = q.nodes[qn];
        if (a.type == NodeType::Input && b.type == NodeType::Input) {
            if (bij[a.var] != b.var)
                throw NotCompatibleError("input nodes " + std::to_string(pn) + " and " +
                                         std::to_string(qn) + " pair variables " + std::to_string(a.var) +
                                         " and " + std::to_string(b.var) + " outside the bijection");
            return leaf_wasserstein_cost(a.leaf, b.leaf, p_order);
        }

        if (a.type == NodeType::Product && b.type == NodeType::Product) {
            const long long pk = (long long)gid_p[pn] * ngid_q + gid_q[qn];
            if (auto it = pmemo.find(pk); it != pmemo.end()) return it->second;
            double g = 0;
            for (int ca : a.children) {
                auto sa = mapped_scope(ca);
                int match = -1;
                for (int cb : b.children)
                    if (scopes_q[cb] == sa) {
                        match = cb;
                        break;
                    }
                if (match == -1)
                    throw NotCompatibleError("product pair (" + std::to_string(pn) + "," + std::to_string(qn) +
                                             ") has no matching child scope");
                g += run(ca, match);
            }
            pmemo.emplace(pk, g);
            return g;
        }

        const long long k = (long long)pn * (long long)q.nodes.size() + qn;
        if (auto it = memo.find(k); it != memo.end()) return it->second;

        double g = 0;
        if (a.type == NodeType::Sum && b.type == NodeType::Sum) {
            const long long gk = (long long)sig_p[pn] * nsig_q + sig_q[qn];
            auto git = grids.find(gk);
            if (git == grids.end()) {
                std::vector<std::vector<double>> cost(a.children.size(),
                                                      std::vector<double>(b.children.size()));
                for (size_t i = 0; i < a.children.size(); ++i)
                    for (size_t j = 0; j < b.children.size(); ++j)
                        cost[i][j] = run(a.children[i], b.children[j]);
                git = grids.emplace(gk, std::move(cost)).first;
            }
            g = transportation_cost(a.weights, b.weights, git->second);
        } else if (a.type == NodeType::Sum || b.type == NodeType::Sum) {
            // The non-sum side acts as a single child of weight one.
            std::vector<int> rows_c = a.type == NodeType::Sum ? a.children : std::vector<int>{pn};
            std::vector<int> cols_c = b.type == NodeType::Sum ? b.children : std::vector<int>{qn};
            std::vector<std::vector<double>> cost(rows_c.size(), std::vector<double>(cols_c.size()));
            for (size_t i = 0; i < rows_c.size(); ++i)
                for (size_t j = 0; j < cols_c.size(); ++j) cost[i][j] = run(rows_c[i], cols_c[j]);
            std::vector<double> rw = a.type == NodeType::Sum ? a.weights : std::vector<double>{1.0};
            std::vector<double> cw = b.type == NodeType::Sum ? b.weights : std::vector<double>{1.0};
            g = transportation_cost(rw, cw, cost);
        } else if (a.type == NodeType::Product) {
            if (a.children.size() != 1)
                throw NotCompatibleError("product node " + std::to_string(pn) +
                                         " pairs with an input node of narrower scope");
            g = run(a.children[0], qn);
        } else {
            if (b.children.size() != 1)
                throw NotCompatibleError("product node " + std::to_string(qn) +
                                         " pairs with an input node of narrower scope");
            g = run(pn, b.children[0]);
        }
        memo.emplace(k, g);
        return g;
    }
};

} // namespace

double cw_cost(const Circuit& p, const Circuit& q, const Bijection& bij, int p_order) {
    if (p_order < 1) throw DomainError("order p must be >= 1");
    auto compat = check_compatible(p, q, bij);
    if (!compat.compatible) throw NotCompatibleError(compat.reason);
    CostWalker w(p, q, bij, p_order);
    return w.run(p.root, q.root);
}

namespace {

double leaf_pair_cost(const Node& nd, int p_order) {
    if (nd.plan.kind == OTPlan::Kind::DiscreteJoint) {
        double s = 0;
        for (size_t x = 0; x < nd.plan.table.size(); ++x)
            for (size_t y = 0; y < nd.plan.table[x].size(); ++y)
                s += nd.plan.table[x][y] * ipow(std::abs(double(x) - double(y)), p_order);
        return s;
    }
    // cost of the map y = a*x + b under X ~ N(mu, sigma), p = 2
    double am = 1.0 - nd.plan.a;
    return am * am * nd.leaf.sigma * nd.leaf.sigma + ipow(am * nd.leaf.mu - nd.plan.b, 2);
}

} // namespace

double cw_objective(const CouplingCircuit& c) {
    std::vector<int> sum_info_of(c.circuit.nodes.size(), -1);
    for (size_t s = 0; s < c.sums.size(); ++s) sum_info_of[c.sums[s].node] = int(s);

    std::vector<double> g(c.circuit.nodes.size(), 0.0);
    for (size_t i = 0; i < c.circuit.nodes.size(); ++i) {
        const Node& nd = c.circuit.nodes[i];
        switch (nd.type) {
            case NodeType::PairInput:
                g[i] = leaf_pair_cost(nd, c.p_order);
                break;
            case NodeType::Input:
                throw FormatError("plain input node inside a coupling circuit");
            case NodeType::Product: {
                double s = 0;
                for (int ch : nd.children) s += g[ch];
                g[i] = s;
                break;
            }
            case NodeType::Sum: {
                int si = sum_info_of[i];
                if (si >= 0) {
                    const auto& info = c.sums[si];
                    for (int r = 0; r < info.rows; ++r) {
                        double rs = 0;
                        for (int cc = 0; cc < info.cols; ++cc) rs += nd.weights[r * info.cols + cc];
                        if (std::abs(rs - info.row_w[r]) > 1e-6)
                            throw InfeasibleWeightsError("sum node " + std::to_string(i) + " row " +
                                                         std::to_string(r) + " mass " + std::to_string(rs) +
                                                         " != " + std::to_string(info.row_w[r]));
                    }
                    for (int cc = 0; cc < info.cols; ++cc) {
                        double cs = 0;
                        for (int r = 0; r < info.rows; ++r) cs += nd.weights[r * info.cols + cc];
                        if (std::abs(cs - info.col_w[cc]) > 1e-6)
                            throw InfeasibleWeightsError("sum node " + std::to_string(i) + " column " +
                                                         std::to_string(cc) + " mass " + std::to_string(cs) +
                                                         " != " + std::to_string(info.col_w[cc]));
                    }
                }
                double s = 0;
                for (size_t j = 0; j < nd.children.size(); ++j) s += nd.weights[j] * g[nd.children[j]];
                g[i] = s;
                break;
            }
        }
    }
    return g[c.circuit.root];
}

Circuit transport_condition(const CouplingCircuit& c, const std::vector<double>& x) {
    const Circuit& cc = c.circuit;
    const int v = c.vars_per_side;
    if (int(x.size()) != v) throw LengthMismatchError("conditioning point has wrong dimension");

    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> ll(cc.nodes.size(), 0.0);
    Circuit out;
    out.num_vars = v;
    out.nodes.reserve(cc.nodes.size());

    for (size_t i = 0; i < cc.nodes.size(); ++i) {
        const Node& nd = cc.nodes[i];
        switch (nd.type) {
            case NodeType::PairInput: {
                VarId y = nd.y_var - v;
                if (nd.plan.kind == OTPlan::Kind::AffineMap) {
                    ll[i] = nd.leaf.log_density(x[nd.var]);
                    out.nodes.push_back(input_node(y, dirac(nd.plan.a * x[nd.var] + nd.plan.b)));
                } else {
                    const auto& t = nd.plan.table;
                    double xv = x[nd.var];
                    double r = std::round(xv);
                    if (std::abs(xv - r) > 1e-9 || r < 0 || r >= double(t.size()))
                        throw DomainError("conditioning value outside pair support");
                    int xi = int(r);
                    double mass = 0;
                    for (double m : t[xi]) mass += m;
                    ll[i] = mass > 0 ? std::log(mass) : neg_inf;
                    if (mass > 0) {
                        std::vector<double> probs(t[xi]);
                        for (double& p : probs) p /= mass;
                        if (nd.y_leaf.kind == LeafKind::Bernoulli && probs.size() == 2)
                            out.nodes.push_back(input_node(y, bernoulli(probs[1])));
                        else
                            out.nodes.push_back(input_node(y, categorical(std::move(probs))));
                    } else {
                        // unreachable under this evidence; keep the marginal so
                        // the node stays well-formed (its posterior weight is 0)
                        out.nodes.push_back(input_node(y, nd.y_leaf));
                    }
                }
                break;
            }
            case NodeType::Input:
                throw FormatError("plain input node inside a coupling circuit");
            case NodeType::Product: {
                double s = 0;
                for (int ch : nd.children) s += ll[ch];
                ll[i] = s;
                out.nodes.push_back(product_node(nd.children));
                break;
            }
            case NodeType::Sum: {
                double hi = neg_inf;
                for (size_t j = 0; j < nd.children.size(); ++j)
                    if (nd.weights[j] > 0) hi = std::max(hi, std::log(nd.weights[j]) + ll[nd.children[j]]);
                std::vector<double> w(nd.children.size(), 0.0);
                if (hi == neg_inf) {
                    ll[i] = neg_inf;
                    w = nd.weights;  // dead branch: keep shape, parent weight is 0
                } else {
                    double z = 0;
                    for (size_t j = 0; j < nd.children.size(); ++j) {
                        if (nd.weights[j] <= 0) continue;
                        w[j] = std::exp(std::log(nd.weights[j]) + ll[nd.children[j]] - hi);
                        z += w[j];
                    }
                    for (double& wj : w) wj /= z;
                    ll[i] = hi + std::log(z);
                }
                out.nodes.push_back(sum_node(nd.children, std::move(w)));
                break;
            }
        }
    }

    if (ll[cc.root] == neg_inf || ll[cc.root] < std::log(1e-300))
        throw ZeroEvidenceError("conditioning point has zero likelihood under the X marginal");
    out.root = cc.root;
    return out;
}

std::vector<double> transport_point(const CouplingCircuit& c, const std::vector<double>& x) {
    const int v = c.vars_per_side;
    if (int(x.size()) != v) throw LengthMismatchError("transport point has wrong dimension");
    std::vector<double> xy(2 * v, 0.0);
    std::vector<char> given(2 * v, 0);
    for (int i = 0; i < v; ++i) {
        xy[i] = x[i];
        given[i] = 1;
    }
    auto ce = conditional_expectation(c.circuit, xy, given);
    return std::vector<double>(ce.begin() + v, ce.end());
}

std::vector<double> geodesic_point(const std::vector<double>& x, const std::vector<double>& y, double t) {
    if (x.size() != y.size()) throw LengthMismatchError("geodesic endpoints have different dimensions");
    if (t < 0.0 || t > 1.0) throw DomainError("interpolation time must lie in [0,1]");
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = (1.0 - t) * x[i] + t * y[i];
    return out;
}

json coupling_to_json(const CouplingCircuit& c) {
    json j = circuit_to_json(c.circuit);
    j["vars_per_side"] = c.vars_per_side;
    j["p_order"] = c.p_order;
    j["optimal_cost"] = c.optimal_cost;
    json prov = json::array();
    for (auto [pn, qn] : c.provenance) prov.push_back(json::array({pn, qn}));
    j["provenance"] = std::move(prov);
    json sums = json::array();
    for (const auto& s : c.sums)
        sums.push_back({{"node", s.node},
                        {"rows", s.rows},
                        {"cols", s.cols},
                        {"row_weights", s.row_w},
                        {"col_weights", s.col_w}});
    j["sums"] = std::move(sums);
    return j;
}

CouplingCircuit coupling_from_json(const json& j) {
    CouplingCircuit c;
    try {
        c.circuit = circuit_from_json(j);
        c.vars_per_side = j.at("vars_per_side").get<int>();
        c.p_order = j.at("p_order").get<int>();
        c.optimal_cost = j.at("optimal_cost").get<double>();
        for (const auto& e : j.at("provenance")) c.provenance.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        for (const auto& e : j.at("sums")) {
            CouplingCircuit::SumInfo s;
            s.node = e.at("node").get<int>();
            s.rows = e.at("rows").get<int>();
            s.cols = e.at("cols").get<int>();
            s.row_w = e.at("row_weights").get<std::vector<double>>();
            s.col_w = e.at("col_weights").get<std::vector<double>>();
            c.sums.push_back(std::move(s));
        }
    } catch (const json::exception& ex) {
        throw FormatError(std::string("bad coupling JSON: ") + ex.what());
    }
    if (c.provenance.size() != c.circuit.nodes.size())
        throw FormatError("provenance length disagrees with node count");
    return c;
}

void save_coupling(const std::string& path, const CouplingCircuit& c) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << coupling_to_json(c).dump(2) << "\n";
}

CouplingCircuit load_coupling(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("cannot parse '") + path + "': " + ex.what());
    }
    return coupling_from_json(j);
}

} // namespace pcot
