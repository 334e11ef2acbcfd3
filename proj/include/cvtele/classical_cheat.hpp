#pragma once

// Measure-and-reprepare ("classical") teleportation of coherent states drawn
// from a Gaussian prior p(beta) = (lambda/pi) exp(-lambda |beta - mean|^2).
// Alice heterodynes, Bob prepares |f_alpha>. With Bob's gain 1/(1+lambda) the
// average fidelity reaches (1+lambda)/(2+lambda).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <variant>

#include "cvtele/error.hpp"
#include "cvtele/fock.hpp"
#include "cvtele/monte_carlo.hpp"
#include "cvtele/quadrature.hpp"

namespace cvtele {

using cdouble = std::complex<double>;

struct GaussianPrior {
  double lambda = 1.0;
  cdouble mean{0.0, 0.0};

  GaussianPrior() = default;
  explicit GaussianPrior(double lambda_, cdouble mean_ = {}) : lambda(lambda_), mean(mean_) {
    if (!(lambda > 0)) throw Error(Errc::lambda_non_positive, "prior needs lambda > 0");
  }
};

/// Bob's rule alpha -> |f_alpha>.
///
/// The gain family prepares the coherent state |anchor + g (alpha - anchor)>;
/// anchor = 0 is the plain gain rule. Custom rules return an arbitrary Fock
/// vector and are scored in Fock space only.
class CheatStrategy {
 public:
  struct Gain {
    double g;
    cdouble anchor;
  };
  using Custom = std::function<FockVector<double>(cdouble)>;

  static CheatStrategy gain(double g, cdouble anchor = {}) {
    if (!(g >= 0)) throw Error(Errc::invalid_argument, "gain must be >= 0");
    return CheatStrategy(Gain{g, anchor});
  }
  static CheatStrategy custom(Custom rule) { return CheatStrategy(std::move(rule)); }
  /// g = 1/(1+lambda), re-centred on the prior mean.
  static CheatStrategy optimal(const GaussianPrior& prior) {
    return gain(1.0 / (1.0 + prior.lambda), prior.mean);
  }

  bool is_gain() const { return std::holds_alternative<Gain>(rule_); }
  const Gain& gain_params() const { return std::get<Gain>(rule_); }
  const Custom& custom_rule() const { return std::get<Custom>(rule_); }

  /// Coherent label Bob prepares for a gain rule.
  cdouble label(cdouble alpha) const {
    const auto& p = gain_params();
    return p.anchor + p.g * (alpha - p.anchor);
  }

 private:
  explicit CheatStrategy(std::variant<Gain, Custom> r) : rule_(std::move(r)) {}
  std::variant<Gain, Custom> rule_;
};

/// Heterodyne outcome for input |beta>: density (1/pi) exp(-|alpha - beta|^2),
/// i.e. independent real and imaginary noise of variance 1/2 each.
template <typename URBG>
cdouble heterodyne_sample(cdouble beta, URBG& rng) {
  std::normal_distribution<double> noise(0.0, std::sqrt(0.5));
  const double re = noise(rng);
  const double im = noise(rng);
  return beta + cdouble(re, im);
}

/// Draw from the prior: real and imaginary parts of variance 1/(2 lambda).
template <typename URBG>
cdouble prior_sample(const GaussianPrior& prior, URBG& rng) {
  if (!(prior.lambda > 0)) throw Error(Errc::lambda_non_positive, "prior needs lambda > 0");
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 / prior.lambda));
  const double re = g(rng);
  const double im = g(rng);
  return prior.mean + cdouble(re, im);
}

FockVector<double> reprepare(const CheatStrategy& strategy, cdouble alpha, int N,
                             double leak_tolerance = kDefaultLeakTolerance);

struct McOptions {
  int threads = 1;
  int N = kDefaultTruncation;  // Fock truncation for custom strategies
  double leak_tolerance = kDefaultLeakTolerance;
};

/// E_beta E_{alpha|beta} |<f_alpha|beta>|^2 by Monte Carlo. Gain rules use the
/// exact overlap exp(-|gamma - beta|^2); custom rules go through Fock vectors.
Estimate mc_average_fidelity(const GaussianPrior& prior, const CheatStrategy& strategy,
                             std::int64_t n_samples, const SeedStream& seeds,
                             const McOptions& options = {});

/// Same estimator, scoring gain rules through truncated Fock vectors.
Estimate mc_average_fidelity_fock(const GaussianPrior& prior, const CheatStrategy& strategy,
                                  std::int64_t n_samples, const SeedStream& seeds,
                                  const McOptions& options = {});

/// (1+lambda)/(2+lambda); lambda = 0 is the uniform-prior limit 1/2.
double fmax_analytic(double lambda);

/// Optimal gain rule against a prior centred at prior_mean. With shifted =
/// false Bob ignores the mean and uses the plain gain 1/(1+lambda).
Estimate mean_shift_invariance(cdouble prior_mean, double lambda, std::int64_t n_samples,
                               const SeedStream& seeds, bool shifted = true,
                               const McOptions& options = {});

enum class OperatorMethod { closed_form, quadrature };

/// The diagonal operator P = pi sum_n (2+lambda)^{-(n+1)} |n><n|.
template <typename Real>
HermitianOperator<Real> heterodyne_p_operator(Real lambda, int N) {
  CMatrix<Real> p = CMatrix<Real>::Zero(N + 1, N + 1);
  const Real ratio = Real(1) / (Real(2) + lambda);
  Real w = std::numbers::pi_v<Real> * ratio;
  for (int n = 0; n <= N; ++n, w *= ratio) p(n, n) = w;
  return HermitianOperator<Real>(std::move(p));
}

namespace detail {

template <typename Real>
void check_operator_args(Complex<Real> alpha, Real lambda, int N) {
  if (!(lambda > Real(0))) throw Error(Errc::lambda_non_positive, "operator needs lambda > 0");
  if (N < 0) throw Error(Errc::invalid_argument, "truncation N must be >= 0");
  const Complex<Real> nu = alpha / (Real(1) + lambda);
  const Real leak = Real(1) - detail::coherent_amplitudes(nu, N).squaredNorm();
  if (leak > Real(kDefaultLeakTolerance))
    throw Error(Errc::truncation_too_small,
                "|alpha|/(1+lambda) = " + std::to_string(double(std::abs(nu))) +
                    " is outside the validity range at N=" + std::to_string(N));
}

// exp(|alpha|^2/(1+lambda)) D(nu) P D(nu)^dagger with nu = alpha/(1+lambda).
// D is built with extra columns so the inner sum over P's diagonal is complete.
template <typename Real>
CMatrix<Real> o_alpha_closed_form(Complex<Real> alpha, Real lambda, int N) {
  const Real scale = Real(1) / (Real(1) + lambda);
  const Complex<Real> nu = alpha * scale;
  const int inner = N + 1 + 40;
  const CMatrix<Real> d = displacement_block(nu, N + 1, inner);
  Eigen::Matrix<Real, Eigen::Dynamic, 1> p(inner);
  const Real ratio = Real(1) / (Real(2) + lambda);
  Real w = std::numbers::pi_v<Real> * ratio;
  for (int n = 0; n < inner; ++n, w *= ratio) p(n) = w;
  const CMatrix<Real> q = d * p.asDiagonal() * d.adjoint();
  return std::exp(std::norm(alpha) * scale) * q;
}

// Integral of exp(-(1+lambda)|beta|^2 + 2 Re(conj(alpha) beta)) |beta><beta| over
// a polar grid centred on alpha/(1+lambda), where the weight is the radial
// Gaussian exp(|alpha|^2/(1+lambda)) exp(-(1+lambda)|beta - alpha/(1+lambda)|^2).
// Gauss-Legendre in the radius, trapezoid in the angle.
template <typename Real>
CMatrix<Real> o_alpha_polar(Complex<Real> alpha, Real lambda, int N, int radial, int angular) {
  const Real a = Real(1) + lambda;
  const Complex<Real> centre = alpha / a;
  const Real peak = std::norm(alpha) / a;
  const Real extent = std::sqrt((Real(30) + peak) / a);
  const auto rule = gauss_legendre<Real>(radial, Real(0), extent);
  const Real dphi = Real(2) * std::numbers::pi_v<Real> / Real(angular);

  CMatrix<Real> acc = CMatrix<Real>::Zero(N + 1, N + 1);
  CMatrix<Real> cols(N + 1, angular);
  for (int i = 0; i < radial; ++i) {
    const Real rho = rule.nodes(i);
    const Real w = rule.weights(i) * rho * dphi * std::exp(peak - a * rho * rho);
    const Real sw = std::sqrt(w);
    for (int j = 0; j < angular; ++j) {
      const Complex<Real> beta = centre + std::polar(rho, dphi * Real(j));
      cols.col(j) = sw * coherent_amplitudes(beta, N);
    }
    acc.template selfadjointView<Eigen::Lower>().rankUpdate(cols);
  }
  CMatrix<Real> full = acc.template selfadjointView<Eigen::Lower>();
  return full;
}

}  // namespace detail

/// O_alpha = integral exp(-(1+lambda)|beta|^2 + 2 Re(conj(alpha) beta)) |beta><beta| d^2 beta.
///
/// closed_form: exp(|alpha|^2/(1+lambda)) D(alpha/(1+lambda)) P D^dagger.
/// quadrature: the 2D integral itself, refined (doubling both grid sizes) until
/// two successive grids agree entrywise to 1e-9; QuadratureNotConverged if the
/// last refinement still moves an entry by more than 1e-6.
template <typename Real>
HermitianOperator<Real> build_O_alpha(Complex<Real> alpha, Real lambda, int N,
                                      OperatorMethod method = OperatorMethod::closed_form) {
  detail::check_operator_args(alpha, lambda, N);
  if (method == OperatorMethod::closed_form)
    return HermitianOperator<Real>::symmetrized(detail::o_alpha_closed_form(alpha, lambda, N));

  int radial = 48, angular = 64;
  CMatrix<Real> prev = detail::o_alpha_polar(alpha, lambda, N, radial, angular);
  Real change = std::numeric_limits<Real>::infinity();
  for (int level = 0; level < 3; ++level) {
    radial *= 2;
    angular *= 2;
    CMatrix<Real> next = detail::o_alpha_polar(alpha, lambda, N, radial, angular);
    change = (next - prev).cwiseAbs().maxCoeff();
    prev = std::move(next);
    if (change <= Real(1e-9)) break;
  }
  if (change > Real(1e-6))
    throw Error(Errc::quadrature_not_converged,
                "O_alpha quadrature refinement changed entries by " + std::to_string(double(change)));
  return HermitianOperator<Real>::symmetrized(prev);
}

struct OptimalEigenvectorCheck {
  double mu1;
  double mu1_expected;  // exp(|alpha|^2/(1+lambda)) pi/(2+lambda)
  double match_fidelity;  // |<v|alpha/(1+lambda)>|^2
  FockVector<double> eigenvector;
};

OptimalEigenvectorCheck verify_optimal_eigenvector(
    cdouble alpha, double lambda, int N, OperatorMethod method = OperatorMethod::closed_form);

}  // namespace cvtele
