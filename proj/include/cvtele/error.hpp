#pragma once

#include <stdexcept>
#include <string>

namespace cvtele {

enum class Errc {
  truncation_too_small,
  no_convergence,
  shape_mismatch,
  not_hermitian,
  invalid_povm,
  negative_probability,
  grid_too_coarse,
  quadrature_not_converged,
  lambda_non_positive,
  lambda_negative,
  theta_out_of_range,
  dimension_too_small,
  non_positive_error,
  invalid_argument,
  config_invalid,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::truncation_too_small: return "TruncationTooSmall";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::shape_mismatch: return "ShapeMismatch";
    case Errc::not_hermitian: return "NotHermitian";
    case Errc::invalid_povm: return "InvalidPovm";
    case Errc::negative_probability: return "NegativeProbability";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::quadrature_not_converged: return "QuadratureNotConverged";
    case Errc::lambda_non_positive: return "LambdaNonPositive";
    case Errc::lambda_negative: return "LambdaNegative";
    case Errc::theta_out_of_range: return "ThetaOutOfRange";
    case Errc::dimension_too_small: return "DimensionTooSmall";
    case Errc::non_positive_error: return "NonPositiveError";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::config_invalid: return "ConfigInvalid";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cvtele
