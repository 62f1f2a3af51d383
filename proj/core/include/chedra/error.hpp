#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chedra {

enum class Errc {
  DiscriminantNegative,
  RadicandNegative,
  DegenerateTip,
  InvalidTipConfiguration,
  IdealImage,
  MixedCases,
  SingularDenominator,
  NonSimpleFan,
  InadmissibleSample,
  IncompatibleChaining,
  AngleUnsolvable,
  ClosureFailure,
  ShapeMismatch,
  SchemaError,
  InvariantError,
  SolverDiverged,
  OutOfRange,
};

std::string_view to_string(Errc code);

// All library failures are reported through this one exception type; the code
// says what went wrong, the optional index says where (column, row, quad...).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::optional<int> index = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<int> index() const noexcept { return index_; }
  // what() without the leading code name
  const std::string& message() const noexcept { return message_; }

 private:
  Errc code_;
  std::optional<int> index_;
  std::string message_;
};

}  // namespace chedra
