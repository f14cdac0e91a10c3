#pragma once

#include <cstdint>
#include <vector>

#include "pcot/errors.hpp"

namespace pcot {

using VarId = int;

// Global parameter floors. Learning clamps against these; loaders restore them.
inline constexpr double kSigmaFloor = 1e-3;
inline constexpr double kProbFloor = 1e-6;

enum class LeafKind { Bernoulli, Categorical, Gaussian, Dirac };

// Univariate leaf distribution. Dirac is a degenerate point mass that only
// appears when a deterministic transport map gets conditioned on a point; it
// is never produced by generators or learners.
struct Leaf {
    LeafKind kind = LeafKind::Bernoulli;
    double p = 0.5;                // Bernoulli P(X=1)
    std::vector<double> probs;     // Categorical over {0..m-1}
    double mu = 0.0, sigma = 1.0;  // Gaussian
    double value = 0.0;            // Dirac

    // Number of support points; -1 for continuous kinds.
    int support() const;
    bool discrete() const { return kind == LeafKind::Bernoulli || kind == LeafKind::Categorical; }
    double mean() const;
    // pmf at integer x for discrete kinds, pdf for Gaussian, indicator for
    // Dirac. Throws DomainError outside a discrete leaf's support.
    double density(double x) const;
    double log_density(double x) const;
    // pmf as a dense vector over {0..support-1}; discrete kinds only.
    std::vector<double> pmf() const;
};

Leaf bernoulli(double p);
Leaf categorical(std::vector<double> probs);
Leaf gaussian(double mu, double sigma);
Leaf dirac(double value);

enum class NodeType { Input, Sum, Product, PairInput };

// Leaf-level transport plan between two univariate leaves.
struct OTPlan {
    enum class Kind { DiscreteJoint, AffineMap };
    Kind kind = Kind::DiscreteJoint;
    // DiscreteJoint: table[x][y] is joint mass, rows are X support points.
    std::vector<std::vector<double>> table;
    // AffineMap: the monotone map y = a*x + b.
    double a = 1.0, b = 0.0;
};

struct Node {
    NodeType type = NodeType::Input;
    // Input / PairInput
    VarId var = -1;  // X-side variable for PairInput
    Leaf leaf;       // X-side marginal for PairInput
    // PairInput only
    VarId y_var = -1;
    Leaf y_leaf;
    OTPlan plan;
    // Sum / Product
    std::vector<int> children;
    std::vector<double> weights;  // Sum only, same length as children
};

// Rooted DAG with children stored before parents (ids are topological).
struct Circuit {
    int num_vars = 0;
    std::vector<Node> nodes;
    int root = -1;
};

Node input_node(VarId var, Leaf leaf);
Node pair_input_node(VarId x_var, Leaf x_leaf, VarId y_var, Leaf y_leaf, OTPlan plan);
Node sum_node(std::vector<int> children, std::vector<double> weights);
Node product_node(std::vector<int> children);

struct ValidationReport {
    bool smooth = true;
    bool decomposable = true;
    std::vector<std::string> issues;
    bool ok() const { return smooth && decomposable && issues.empty(); }
};

// Structural breakage (bad ids, cycles, childless internal nodes, weight
// length mismatches, unreachable nodes, several roots) throws; the smooth /
// decomposable verdicts and soft issues come back in the report.
ValidationReport validate(const Circuit& c);

// Scope of every node as a sorted variable list. Validates structure first.
std::vector<std::vector<VarId>> compute_scopes(const Circuit& c);

} // namespace pcot
