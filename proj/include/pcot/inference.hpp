#pragma once

#include <vector>

#include "pcot/circuit.hpp"
#include "pcot/rng.hpp"

namespace pcot {

// Full-assignment density/mass at the root. PairInput nodes treat the
// assignment as covering both of their variables.
double evaluate(const Circuit& c, const std::vector<double>& x);
double log_evaluate(const Circuit& c, const std::vector<double>& x);

// Marginal over the assigned variables; `given[v]` marks x[v] as evidence.
// Unassigned leaves integrate to one.
double marginal(const Circuit& c, const std::vector<double>& x, const std::vector<char>& given);
double log_marginal(const Circuit& c, const std::vector<double>& x, const std::vector<char>& given);

// One ancestral sample. Deterministic in the key.
std::vector<double> sample(const Circuit& c, rng::Key key);
// n samples, sample i drawn from key.child(i) so results are independent of
// iteration order.
std::vector<std::vector<double>> sample_n(const Circuit& c, int n, rng::Key key);

// E[unassigned vars | assigned vars]. Returns a full-length vector carrying
// the evidence values on evidence slots and conditional means elsewhere.
// Throws ZeroEvidenceError when the evidence has no support.
std::vector<double> conditional_expectation(const Circuit& c, const std::vector<double>& x,
                                            const std::vector<char>& given);

} // namespace pcot
