#include "pcot/circuit_json.hpp"

#include <cmath>
#include <fstream>

namespace pcot {

namespace {

// Rescale to an exact unit sum when within tolerance, otherwise reject.
void renormalize(std::vector<double>& w, double tol, const std::string& what) {
    double s = 0;
    for (double v : w) {
        if (v < 0) throw FormatError(what + " has a negative entry");
        s += v;
    }
    if (std::abs(s - 1.0) > tol) throw FormatError(what + " sums to " + std::to_string(s));
    for (double& v : w) v /= s;
}

} // namespace

json leaf_to_json(const Leaf& l) {
    switch (l.kind) {
        case LeafKind::Bernoulli: return {{"kind", "bernoulli"}, {"p", l.p}};
        case LeafKind::Categorical: return {{"kind", "categorical"}, {"probs", l.probs}};
        case LeafKind::Gaussian: return {{"kind", "gaussian"}, {"mu", l.mu}, {"sigma", l.sigma}};
        case LeafKind::Dirac: return {{"kind", "dirac"}, {"value", l.value}};
    }
    throw FormatError("unknown leaf kind");
}

Leaf leaf_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bernoulli") {
        double p = j.at("p").get<double>();
        if (p < 0.0 || p > 1.0) throw FormatError("bernoulli p out of [0,1]");
        return bernoulli(p);
    }
    if (kind == "categorical") {
        auto probs = j.at("probs").get<std::vector<double>>();
        if (probs.empty()) throw FormatError("categorical needs at least one probability");
        renormalize(probs, 1e-9, "categorical probs");
        return categorical(std::move(probs));
    }
    if (kind == "gaussian") {
        double mu = j.at("mu").get<double>();
        double sigma = j.at("sigma").get<double>();
        if (!(sigma > 0)) throw FormatError("gaussian sigma must be positive");
        return gaussian(mu, std::max(sigma, kSigmaFloor));
    }
    if (kind == "dirac") return dirac(j.at("value").get<double>());
    throw FormatError("unknown leaf kind '" + kind + "'");
}

namespace {

json plan_to_json(const Node& nd) {
    if (nd.plan.kind == OTPlan::Kind::DiscreteJoint)
        return {{"kind", "ot_joint"},
                {"table", nd.plan.table},
                {"x", leaf_to_json(nd.leaf)},
                {"y", leaf_to_json(nd.y_leaf)}};
    return {{"kind", "ot_affine"},
            {"a", nd.plan.a},
            {"b", nd.plan.b},
            {"x", leaf_to_json(nd.leaf)},
            {"y", leaf_to_json(nd.y_leaf)}};
}

} // namespace

json circuit_to_json(const Circuit& c) {
    json nodes = json::array();
    for (size_t i = 0; i < c.nodes.size(); ++i) {
        const Node& nd = c.nodes[i];
        json e;
        e["id"] = int(i);
        switch (nd.type) {
            case NodeType::Input:
                e["type"] = "input";
                e["var"] = nd.var;
                e["dist"] = leaf_to_json(nd.leaf);
                break;
            case NodeType::PairInput:
                e["type"] = "input";
                e["var"] = nd.var;
                e["y_var"] = nd.y_var;
                e["dist"] = plan_to_json(nd);
                break;
            case NodeType::Sum:
                e["type"] = "sum";
                e["children"] = nd.children;
                e["weights"] = nd.weights;
                break;
            case NodeType::Product:
                e["type"] = "product";
                e["children"] = nd.children;
                break;
        }
        nodes.push_back(std::move(e));
    }
    return {{"num_vars", c.num_vars}, {"nodes", std::move(nodes)}, {"root", c.root}};
}

Circuit circuit_from_json(const json& j) {
    Circuit c;
    try {
        c.num_vars = j.at("num_vars").get<int>();
        c.root = j.at("root").get<int>();
        const json& nodes = j.at("nodes");
        if (!nodes.is_array()) throw FormatError("'nodes' must be an array");
        c.nodes.reserve(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            const json& e = nodes[i];
            if (e.at("id").get<int>() != int(i))
                throw FormatError("node ids must be dense and ordered; found id " +
                                  std::to_string(e.at("id").get<int>()) + " at position " + std::to_string(i));
            const std::string type = e.at("type").get<std::string>();
            if (type == "input") {
                const json& dist = e.at("dist");
                const std::string kind = dist.at("kind").get<std::string>();
                if (kind == "ot_joint" || kind == "ot_affine") {
                    OTPlan plan;
                    if (kind == "ot_joint") {
                        plan.kind = OTPlan::Kind::DiscreteJoint;
                        plan.table = dist.at("table").get<std::vector<std::vector<double>>>();
                        if (plan.table.empty() || plan.table[0].empty())
                            throw FormatError("ot_joint table must be non-empty");
                    } else {
                        plan.kind = OTPlan::Kind::AffineMap;
                        plan.a = dist.at("a").get<double>();
                        plan.b = dist.at("b").get<double>();
                    }
                    c.nodes.push_back(pair_input_node(e.at("var").get<int>(), leaf_from_json(dist.at("x")),
                                                      e.at("y_var").get<int>(), leaf_from_json(dist.at("y")),
                                                      std::move(plan)));
                } else {
                    c.nodes.push_back(input_node(e.at("var").get<int>(), leaf_from_json(dist)));
                }
            } else if (type == "sum") {
                auto children = e.at("children").get<std::vector<int>>();
                auto weights = e.at("weights").get<std::vector<double>>();
                if (children.size() != weights.size())
                    throw LengthMismatchError("sum node " + std::to_string(i) + " children/weights mismatch");
                renormalize(weights, 1e-9, "weights of sum node " + std::to_string(i));
                c.nodes.push_back(sum_node(std::move(children), std::move(weights)));
            } else if (type == "product") {
                c.nodes.push_back(product_node(e.at("children").get<std::vector<int>>()));
            } else {
                throw FormatError("unknown node type '" + type + "'");
            }
        }
    } catch (const json::exception& ex) {
        throw FormatError(std::string("bad circuit JSON: ") + ex.what());
    }
    validate(c);  // throws on structural breakage
    return c;
}

void save_circuit(const std::string& path, const Circuit& c) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << circuit_to_json(c).dump(2) << "\n";
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("cannot parse '") + path + "': " + ex.what());
    }
    return circuit_from_json(j);
}

} // namespace pcot
