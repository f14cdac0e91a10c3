#include "pcot/compatibility.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pcot {

Bijection identity_bijection(int num_vars) {
    Bijection b(num_vars);
    for (int i = 0; i < num_vars; ++i) b[i] = i;
    return b;
}

void check_bijection(const Bijection& bij, int num_vars) {
    if (int(bij.size()) != num_vars)
        throw BijectionError("bijection has " + std::to_string(bij.size()) + " entries for " +
                             std::to_string(num_vars) + " variables");
    std::vector<char> seen(num_vars, 0);
    for (VarId v : bij) {
        if (v < 0 || v >= num_vars) throw BijectionError("bijection target " + std::to_string(v) + " out of range");
        if (seen[v]) throw BijectionError("bijection target " + std::to_string(v) + " repeated");
        seen[v] = 1;
    }
}

Bijection load_bijection(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("cannot parse '") + path + "': " + ex.what());
    }
    if (!j.is_array()) throw FormatError("bijection file must hold a JSON array");
    return j.get<Bijection>();
}

void save_bijection(const std::string& path, const Bijection& bij) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << nlohmann::json(bij).dump() << "\n";
}

namespace {

using Scope = std::vector<VarId>;

std::string scope_str(const Scope& s) {
    std::ostringstream ss;
    ss << "{";
    for (size_t i = 0; i < s.size(); ++i) ss << (i ? "," : "") << s[i];
    ss << "}";
    return ss.str();
}

Scope map_scope(const Scope& s, const Bijection& bij) {
    Scope out;
    out.reserve(s.size());
    for (VarId v : s) out.push_back(bij[v]);
    std::sort(out.begin(), out.end());
    return out;
}

// Scope -> sorted list of part scopes, collected from product nodes.
using DecompMap = std::map<Scope, std::vector<Scope>>;

// Returns false (with a diagnostic) when one scope gets two different
// decompositions.
bool collect_decompositions(const Circuit& c, const std::vector<Scope>& scopes, const Bijection* bij,
                            DecompMap& out, std::string& conflict) {
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        if (c.nodes[i].type != NodeType::Product) continue;
        Scope key = bij ? map_scope(scopes[i], *bij) : scopes[i];
        std::vector<Scope> parts;
        for (int ch : c.nodes[i].children)
            parts.push_back(bij ? map_scope(scopes[ch], *bij) : scopes[ch]);
        std::sort(parts.begin(), parts.end());
        auto [it, fresh] = out.emplace(key, parts);
        if (!fresh && it->second != parts) {
            conflict = "scope " + scope_str(key) + " decomposed two different ways (product node " +
                       std::to_string(i) + ")";
            return false;
        }
    }
    return true;
}

int build_partition(const Scope& scope, const DecompMap& decomp, ScopePartitionTree& tree) {
    ScopePartitionTree::PNode node;
    node.scope = scope;
    if (scope.size() > 1) {
        auto it = decomp.find(scope);
        if (it == decomp.end())
            throw InconsistentDecompositionError("no product decomposes scope " + scope_str(scope));
        for (const Scope& part : it->second) node.children.push_back(build_partition(part, decomp, tree));
    }
    tree.nodes.push_back(std::move(node));
    return int(tree.nodes.size()) - 1;
}

} // namespace

ScopePartitionTree extract_partition(const Circuit& c) {
    auto scopes = compute_scopes(c);
    DecompMap decomp;
    std::string conflict;
    if (!collect_decompositions(c, scopes, nullptr, decomp, conflict))
        throw InconsistentDecompositionError(conflict);
    ScopePartitionTree tree;
    tree.root = build_partition(scopes[c.root], decomp, tree);
    return tree;
}

CompatibilityResult check_compatible(const Circuit& p, const Circuit& q, const Bijection& bij) {
    CompatibilityResult res;
    if (p.num_vars != q.num_vars) {
        res.reason = "circuits have different variable counts";
        return res;
    }
    check_bijection(bij, p.num_vars);

    auto rep_p = validate(p), rep_q = validate(q);
    if (!rep_p.smooth || !rep_p.decomposable || !rep_q.smooth || !rep_q.decomposable) {
        res.reason = "compatibility requires smooth, decomposable circuits";
        return res;
    }

    auto scopes_p = compute_scopes(p);
    auto scopes_q = compute_scopes(q);

    // Q products grouped by scope.
    std::map<Scope, std::vector<int>> q_by_scope;
    for (size_t j = 0; j < q.nodes.size(); ++j)
        if (q.nodes[j].type == NodeType::Product) q_by_scope[scopes_q[j]].push_back(int(j));

    for (size_t i = 0; i < p.nodes.size(); ++i) {
        if (p.nodes[i].type != NodeType::Product) continue;
        Scope mapped = map_scope(scopes_p[i], bij);
        auto it = q_by_scope.find(mapped);
        if (it == q_by_scope.end()) continue;

        std::vector<Scope> parts_p;
        for (int ch : p.nodes[i].children) parts_p.push_back(map_scope(scopes_p[ch], bij));
        std::sort(parts_p.begin(), parts_p.end());

        for (int j : it->second) {
            std::vector<Scope> parts_q;
            for (int ch : q.nodes[j].children) parts_q.push_back(scopes_q[ch]);
            std::sort(parts_q.begin(), parts_q.end());
            if (parts_p != parts_q) {
                res.reason = "product nodes " + std::to_string(i) + " (P) and " + std::to_string(j) +
                             " (Q) share scope " + scope_str(mapped) + " but decompose it differently";
                return res;
            }
            res.product_pairs.emplace_back(int(i), j);
        }
    }

    // The shared hierarchy must exist as one consistent tree.
    DecompMap decomp;
    std::string conflict;
    if (!collect_decompositions(p, scopes_p, &bij, decomp, conflict) ||
        !collect_decompositions(q, scopes_q, nullptr, decomp, conflict)) {
        res.reason = conflict;
        return res;
    }
    Scope root_scope = map_scope(scopes_p[p.root], bij);
    if (root_scope != scopes_q[q.root]) {
        res.reason = "root scopes differ under the bijection";
        return res;
    }
    try {
        res.partition.root = build_partition(root_scope, decomp, res.partition);
    } catch (const InconsistentDecompositionError& ex) {
        res.reason = ex.what();
        return res;
    }

    res.compatible = true;
    return res;
}

} // namespace pcot
