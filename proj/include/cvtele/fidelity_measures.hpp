#pragma once

// Operational reading of the fidelity <psi|rho|psi>: outcome statistics of a
// POVM on input and output, their Bhattacharyya overlap, and the inequality
// overlap^2 >= fidelity. Also the Gaussian pair psi_+/psi_- whose x and k
// densities coincide although the states are nearly orthogonal.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cvtele/error.hpp"
#include "cvtele/fock.hpp"

namespace cvtele {

template <typename Real>
class Povm {
 public:
  Povm(std::vector<HermitianOperator<Real>> elements, std::vector<std::string> labels = {})
      : elements_(std::move(elements)), labels_(std::move(labels)) {
    if (elements_.empty()) throw Error(Errc::invalid_povm, "POVM has no elements");
    if (labels_.empty())
      for (std::size_t k = 0; k < elements_.size(); ++k) labels_.push_back(std::to_string(k));
    if (labels_.size() != elements_.size())
      throw Error(Errc::invalid_povm, "label count differs from element count");
    const int N = elements_.front().truncation();
    CMatrix<Real> sum = CMatrix<Real>::Zero(N + 1, N + 1);
    for (const auto& e : elements_) {
      if (e.truncation() != N) throw Error(Errc::invalid_povm, "elements of different truncation");
      if (!e.is_psd()) throw Error(Errc::invalid_povm, "element is not positive semidefinite");
      sum += e.matrix();
    }
    const Real defect = (sum - CMatrix<Real>::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff();
    if (defect > Real(1e-9))
      throw Error(Errc::invalid_povm, "elements sum to identity only within " +
                                          std::to_string(double(defect)));
  }

  /// {|psi><psi|, I - |psi><psi|}: the observable whose overlap saturates the bound.
  static Povm binary(const FockVector<Real>& psi) {
    const CVector<Real> v = psi.amplitudes().normalized();
    const int N = psi.truncation();
    CMatrix<Real> p = v * v.adjoint();
    CMatrix<Real> q = CMatrix<Real>::Identity(N + 1, N + 1) - p;
    return Povm({HermitianOperator<Real>::symmetrized(p), HermitianOperator<Real>::symmetrized(q)},
                {"psi", "not-psi"});
  }

  /// Rank-one projectors onto the columns of a unitary.
  static Povm projective(const CMatrix<Real>& unitary) {
    std::vector<HermitianOperator<Real>> elements;
    for (Eigen::Index k = 0; k < unitary.cols(); ++k) {
      const CVector<Real> c = unitary.col(k);
      elements.push_back(HermitianOperator<Real>::symmetrized(c * c.adjoint()));
    }
    return Povm(std::move(elements));
  }

  int truncation() const { return elements_.front().truncation(); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<HermitianOperator<Real>>& elements() const { return elements_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<HermitianOperator<Real>> elements_;
  std::vector<std::string> labels_;
};

template <typename Real>
struct OutcomeDistributions {
  std::vector<Real> in;
  std::vector<Real> out;
};

/// P_in,k = <psi|E_k|psi>, P_out,k = tr(rho E_k).
///
/// Probabilities below the evaluation noise floor (32 eps dim) are set to 0:
/// the overlap takes square roots, which would turn 1e-16 into 1e-8.
template <typename Real>
OutcomeDistributions<Real> outcome_distributions(const FockVector<Real>& psi_in,
                                                 const HermitianOperator<Real>& rho_out,
                                                 const Povm<Real>& povm) {
  if (psi_in.truncation() != povm.truncation() || rho_out.truncation() != povm.truncation())
    throw Error(Errc::shape_mismatch, "state, density operator and POVM truncations differ");
  OutcomeDistributions<Real> d;
  const Real floor = Real(32) * std::numeric_limits<Real>::epsilon() * Real(povm.truncation() + 1);
  auto clean = [floor](Real p) { return std::abs(p) <= floor ? Real(0) : p; };
  Real sum_in(0), sum_out(0);
  for (const auto& e : povm.elements()) {
    d.in.push_back(clean(e.expectation(psi_in)));
    d.out.push_back(clean((rho_out.matrix() * e.matrix()).trace().real()));
    sum_in += d.in.back();
    sum_out += d.out.back();
  }
  if (std::abs(sum_in - Real(1)) > Real(1e-8) || std::abs(sum_out - Real(1)) > Real(1e-8))
    throw Error(Errc::invalid_povm, "outcome probabilities do not sum to 1");
  return d;
}

/// sum_k sqrt(P_in,k P_out,k). Rounding-level negatives (> -1e-12) count as 0.
template <typename Real>
Real bhattacharyya_overlap(std::span<const Real> p_in, std::span<const Real> p_out) {
  if (p_in.size() != p_out.size())
    throw Error(Errc::shape_mismatch, "distributions have different lengths");
  Real s(0), sum_in(0), sum_out(0);
  for (std::size_t k = 0; k < p_in.size(); ++k) {
    if (p_in[k] < Real(-1e-12) || p_out[k] < Real(-1e-12))
      throw Error(Errc::negative_probability, "negative probability at outcome " + std::to_string(k));
    const Real a = std::max(p_in[k], Real(0)), b = std::max(p_out[k], Real(0));
    s += std::sqrt(a * b);
    sum_in += a;
    sum_out += b;
  }
  if (std::abs(sum_in - Real(1)) > Real(1e-8) || std::abs(sum_out - Real(1)) > Real(1e-8))
    throw Error(Errc::invalid_argument, "distributions must each sum to 1");
  return s;
}

template <typename Real>
struct OverlapBoundCheck {
  Real overlap;
  Real fidelity;
  bool satisfied;  // overlap^2 >= fidelity - 1e-9
};

template <typename Real>
OverlapBoundCheck<Real> check_overlap_bound(const FockVector<Real>& psi_in,
                                            const HermitianOperator<Real>& rho_out,
                                            const Povm<Real>& povm) {
  const auto d = outcome_distributions(psi_in, rho_out, povm);
  const Real overlap = bhattacharyya_overlap<Real>(d.in, d.out);
  const Real fidelity = fidelity_pure_mixed(psi_in, rho_out);
  return {overlap, fidelity, overlap * overlap >= fidelity - Real(1e-9)};
}

/// Bhattacharyya overlap of two continuous outcome densities on [lo, hi],
/// discretised into equal bins (4-point Gauss-Legendre inside each bin). The
/// bin count doubles from `bins` until the overlap moves by less than 1e-6.
double binned_overlap(const std::function<double(double)>& density_in,
                      const std::function<double(double)>& density_out, double lo, double hi,
                      int bins = 64);

/// Parameters of psi_+-(x) = (2a/pi)^{1/4} exp((-a +- i b) x^2); a > 0, b >= 0.
struct GaussianPairParams {
  double a = 1.0;
  double b = 0.0;

  GaussianPairParams() = default;
  GaussianPairParams(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0) || !(b >= 0)) throw Error(Errc::invalid_argument, "need a > 0 and b >= 0");
  }

  /// Standard deviation of |psi_+-(x)|^2.
  double x_sigma() const { return 0.5 / std::sqrt(a); }
};

std::complex<double> gaussian_pair_psi_x(const GaussianPairParams& p, int sign, double x);
std::complex<double> gaussian_pair_psi_k(const GaussianPairParams& p, int sign, double k);

/// <psi_-|psi_+> = sqrt(a (a + i b) / (a^2 + b^2)).
std::complex<double> gaussian_pair_overlap(const GaussianPairParams& p);

struct GaussianPairDensities {
  std::vector<double> x_plus, x_minus, k_plus, k_minus;
  std::complex<double> quadrature_overlap;  // trapezoid <psi_-|psi_+> on the grid
};

/// Pointwise x- and k-space densities of psi_+ and psi_- on `grid`, plus a
/// trapezoid evaluation of <psi_-|psi_+>. The grid must be strictly increasing
/// and cover +-8 x-standard deviations; GridTooCoarse if the trapezoid overlap
/// misses the closed form by more than 1e-6.
GaussianPairDensities gaussian_pair_densities(const GaussianPairParams& p,
                                              std::span<const double> grid);

/// Uniform grid over +-8 standard deviations of the x density.
std::vector<double> gaussian_pair_grid(const GaussianPairParams& p, int points);

}  // namespace cvtele
