// Error taxonomy shared by all copex components.

#pragma once

#include <stdexcept>
#include <string>

namespace copex {

enum class Errc {
    ParamOutOfDomain,       // copula/marginal parameter violates its domain
    NoDensity,              // family has singular components, no Lebesgue density
    ConditionalUndefined,   // conditioning value is exactly 0 or 1
    QuantileDomain,         // probability argument outside (0,1)
    RootNotBracketed,       // numerical inversion lost its bracket (internal)
    InsufficientData,       // fewer observations than the operation needs
    DegenerateSeries,       // zero-variance series where a spread is required
    NegativeVariance,       // combined variance below the floating-point guard
    TruncationNotConverged, // panel doubling exhausted before tolerance met
    SearchFailed,           // likelihood non-finite across the whole bracket
    ParseError,             // malformed input data
    EmptySeries,            // no usable rows after ingestion
    InternalError,          // invariant violated beyond round-off tolerance
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace copex
