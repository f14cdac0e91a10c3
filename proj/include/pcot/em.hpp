#pragma once

#include <cstdint>

#include "pcot/circuit.hpp"
#include "pcot/dataset.hpp"

namespace pcot {

// Full-batch EM baseline: expected-flow E-step, closed-form M-step. Leaves
// are regularized with the same floors as WM learning. The seed is part of
// the interface for symmetry with the other learners; full-batch EM draws
// nothing from it.
Circuit fit_em(const Circuit& c, const Dataset& data, int iters, std::uint64_t seed);

} // namespace pcot
