#include "pcot/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pcot {

namespace {

// Discrete support values are integer-coded doubles coming from CSV or user
// assignments; accept tiny float noise, reject everything else.
int as_support_point(double x, int m) {
    double r = std::round(x);
    if (std::abs(x - r) > 1e-9 || r < 0 || r >= m)
        throw DomainError("value " + std::to_string(x) + " outside discrete support of size " + std::to_string(m));
    return int(r);
}

} // namespace

int Leaf::support() const {
    switch (kind) {
        case LeafKind::Bernoulli: return 2;
        case LeafKind::Categorical: return int(probs.size());
        default: return -1;
    }
}

double Leaf::mean() const {
    switch (kind) {
        case LeafKind::Bernoulli: return p;
        case LeafKind::Categorical: {
            double m = 0;
            for (size_t i = 0; i < probs.size(); ++i) m += double(i) * probs[i];
            return m;
        }
        case LeafKind::Gaussian: return mu;
        case LeafKind::Dirac: return value;
    }
    return 0;
}

double Leaf::density(double x) const {
    switch (kind) {
        case LeafKind::Bernoulli:
            return as_support_point(x, 2) == 1 ? p : 1.0 - p;
        case LeafKind::Categorical:
            return probs[as_support_point(x, int(probs.size()))];
        case LeafKind::Gaussian: {
            double z = (x - mu) / sigma;
            return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
        }
        case LeafKind::Dirac:
            return std::abs(x - value) <= 1e-12 ? 1.0 : 0.0;
    }
    return 0;
}

double Leaf::log_density(double x) const {
    if (kind == LeafKind::Gaussian) {
        double z = (x - mu) / sigma;
        return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    double d = density(x);
    return d > 0 ? std::log(d) : -std::numeric_limits<double>::infinity();
}

std::vector<double> Leaf::pmf() const {
    if (kind == LeafKind::Bernoulli) return {1.0 - p, p};
    if (kind == LeafKind::Categorical) return probs;
    throw UnsupportedPairError("pmf requested for a continuous leaf");
}

Leaf bernoulli(double p) {
    Leaf l;
    l.kind = LeafKind::Bernoulli;
    l.p = p;
    return l;
}

Leaf categorical(std::vector<double> probs) {
    Leaf l;
    l.kind = LeafKind::Categorical;
    l.probs = std::move(probs);
    return l;
}

Leaf gaussian(double mu, double sigma) {
    Leaf l;
    l.kind = LeafKind::Gaussian;
    l.mu = mu;
    l.sigma = sigma;
    return l;
}

Leaf dirac(double value) {
    Leaf l;
    l.kind = LeafKind::Dirac;
    l.value = value;
    return l;
}

Node input_node(VarId var, Leaf leaf) {
    Node n;
    n.type = NodeType::Input;
    n.var = var;
    n.leaf = std::move(leaf);
    return n;
}

Node pair_input_node(VarId x_var, Leaf x_leaf, VarId y_var, Leaf y_leaf, OTPlan plan) {
    Node n;
    n.type = NodeType::PairInput;
    n.var = x_var;
    n.leaf = std::move(x_leaf);
    n.y_var = y_var;
    n.y_leaf = std::move(y_leaf);
    n.plan = std::move(plan);
    return n;
}

Node sum_node(std::vector<int> children, std::vector<double> weights) {
    Node n;
    n.type = NodeType::Sum;
    n.children = std::move(children);
    n.weights = std::move(weights);
    return n;
}

Node product_node(std::vector<int> children) {
    Node n;
    n.type = NodeType::Product;
    n.children = std::move(children);
    return n;
}

namespace {

void check_structure(const Circuit& c) {
    const int n = int(c.nodes.size());
    if (n == 0) throw FormatError("circuit has no nodes");
    if (c.root < 0 || c.root >= n) throw FormatError("root id out of range");
    if (c.num_vars <= 0) throw FormatError("num_vars must be positive");
    for (int i = 0; i < n; ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Input || nd.type == NodeType::PairInput) {
            if (nd.var < 0 || nd.var >= c.num_vars)
                throw FormatError("input node " + std::to_string(i) + " has variable out of range");
            if (nd.type == NodeType::PairInput && (nd.y_var < 0 || nd.y_var >= c.num_vars))
                throw FormatError("pair input node " + std::to_string(i) + " has y variable out of range");
            continue;
        }
        if (nd.children.empty())
            throw EmptyChildrenError("internal node " + std::to_string(i) + " has no children");
        for (int ch : nd.children) {
            if (ch < 0 || ch >= n) throw FormatError("child id out of range at node " + std::to_string(i));
            if (ch >= i)
                throw CycleError("node " + std::to_string(i) + " references child " + std::to_string(ch) +
                                 "; children must precede parents");
        }
        if (nd.type == NodeType::Sum && nd.weights.size() != nd.children.size())
            throw LengthMismatchError("sum node " + std::to_string(i) + " has " +
                                      std::to_string(nd.weights.size()) + " weights for " +
                                      std::to_string(nd.children.size()) + " children");
    }
    // Exactly one root and full reachability from it.
    std::vector<char> reach(n, 0), has_parent(n, 0);
    reach[c.root] = 1;
    for (int i = n - 1; i >= 0; --i) {
        if (!reach[i]) continue;
        for (int ch : c.nodes[i].children) {
            reach[ch] = 1;
            has_parent[ch] = 1;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (!reach[i]) throw FormatError("node " + std::to_string(i) + " unreachable from root");
        if (!has_parent[i] && i != c.root) throw FormatError("node " + std::to_string(i) + " is a second root");
    }
}

} // namespace

std::vector<std::vector<VarId>> compute_scopes(const Circuit& c) {
    check_structure(c);
    std::vector<std::vector<VarId>> scopes(c.nodes.size());
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Input) {
            scopes[i] = {nd.var};
        } else if (nd.type == NodeType::PairInput) {
            scopes[i] = {nd.var, nd.y_var};
            std::sort(scopes[i].begin(), scopes[i].end());
        } else {
            std::vector<VarId> s;
            for (int ch : nd.children) s.insert(s.end(), scopes[ch].begin(), scopes[ch].end());
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            scopes[i] = std::move(s);
        }
    }
    return scopes;
}

ValidationReport validate(const Circuit& c) {
    ValidationReport rep;
    auto scopes = compute_scopes(c);  // throws on structural breakage

    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        if (nd.type == NodeType::Sum) {
            double s = 0;
            for (double w : nd.weights) {
                if (w < 0) rep.issues.push_back("negative weight at sum " + std::to_string(i));
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-9)
                rep.issues.push_back("weights of sum " + std::to_string(i) + " sum to " + std::to_string(s));
            for (int ch : nd.children)
                if (scopes[ch] != scopes[nd.children[0]]) rep.smooth = false;
        } else if (nd.type == NodeType::Product) {
            size_t total = 0;
            for (int ch : nd.children) total += scopes[ch].size();
            // children scopes are disjoint iff no variable collapses in the union
            if (total != scopes[i].size()) rep.decomposable = false;
        } else {
            const Leaf& l = nd.leaf;
            if (l.kind == LeafKind::Gaussian && l.sigma < kSigmaFloor - 1e-15)
                rep.issues.push_back("sigma below floor at node " + std::to_string(i));
            if (l.kind == LeafKind::Categorical) {
                double s = 0;
                for (double q : l.probs) s += q;
                if (std::abs(s - 1.0) > 1e-12)
                    rep.issues.push_back("categorical probs of node " + std::to_string(i) + " sum to " +
                                         std::to_string(s));
            }
            if (nd.type == NodeType::PairInput && nd.plan.kind == OTPlan::Kind::DiscreteJoint) {
                double s = 0;
                for (const auto& row : nd.plan.table)
                    for (double m : row) s += m;
                if (std::abs(s - 1.0) > 1e-9)
                    rep.issues.push_back("pair plan of node " + std::to_string(i) + " has mass " + std::to_string(s));
            }
        }
    }
    if (scopes[c.root].size() != size_t(c.num_vars))
        rep.issues.push_back("root scope covers " + std::to_string(scopes[c.root].size()) + " of " +
                             std::to_string(c.num_vars) + " variables");
    return rep;
}

} // namespace pcot
