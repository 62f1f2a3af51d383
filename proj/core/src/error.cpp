#include "chedra/error.hpp"
#include "chedra/tolerance.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace chedra {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DiscriminantNegative: return "DiscriminantNegative";
    case Errc::RadicandNegative: return "RadicandNegative";
    case Errc::DegenerateTip: return "DegenerateTip";
    case Errc::InvalidTipConfiguration: return "InvalidTipConfiguration";
    case Errc::IdealImage: return "IdealImage";
    case Errc::MixedCases: return "MixedCases";
    case Errc::SingularDenominator: return "SingularDenominator";
    case Errc::NonSimpleFan: return "NonSimpleFan";
    case Errc::InadmissibleSample: return "InadmissibleSample";
    case Errc::IncompatibleChaining: return "IncompatibleChaining";
    case Errc::AngleUnsolvable: return "AngleUnsolvable";
    case Errc::ClosureFailure: return "ClosureFailure";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InvariantError: return "InvariantError";
    case Errc::SolverDiverged: return "SolverDiverged";
    case Errc::OutOfRange: return "OutOfRange";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what, std::optional<int> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index), message_(what) {}

Tolerances Tolerances::from_env() {
  Tolerances tol;
  if (const char* env = std::getenv("CHEDRA_TOLERANCE")) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end != env && std::isfinite(value) && value > 0.0) tol.classify = value;
  }
  return tol;
}

}  // namespace chedra
