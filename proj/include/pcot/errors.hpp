#pragma once

#include <stdexcept>
#include <string>

namespace pcot {

// All library errors derive from Error so callers can catch one type at the
// CLI boundary and still get a specific code for diagnostics.
struct Error : std::runtime_error {
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code(std::move(code)) {}
    std::string code;
};

#define PCOT_DEFINE_ERROR(NAME)                                        \
    struct NAME : Error {                                              \
        explicit NAME(const std::string& msg) : Error(#NAME, msg) {}   \
    }

PCOT_DEFINE_ERROR(CycleError);
PCOT_DEFINE_ERROR(EmptyChildrenError);
PCOT_DEFINE_ERROR(DomainError);
PCOT_DEFINE_ERROR(ZeroEvidenceError);
PCOT_DEFINE_ERROR(ZeroLikelihoodError);
PCOT_DEFINE_ERROR(BijectionError);
PCOT_DEFINE_ERROR(InconsistentDecompositionError);
PCOT_DEFINE_ERROR(NotCompatibleError);
PCOT_DEFINE_ERROR(UnsupportedPairError);
PCOT_DEFINE_ERROR(InfeasibleError);
PCOT_DEFINE_ERROR(InfeasibleWeightsError);
PCOT_DEFINE_ERROR(TooLargeError);
PCOT_DEFINE_ERROR(LengthMismatchError);
PCOT_DEFINE_ERROR(FormatError);

#undef PCOT_DEFINE_ERROR

} // namespace pcot
