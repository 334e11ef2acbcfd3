#pragma once

// Gaussian-state calculus for unit- and scalar-gain continuous-variable
// teleportation with a two-mode squeezed resource.
//
// Conventions: hbar = 1, quadratures x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)),
// vacuum variance 1/2, ordering (x1, p1, x2, p2, ...). A coherent state |beta>
// has mean sqrt(2) (Re beta, Im beta) and covariance I/2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cvtele/error.hpp"
#include "cvtele/fock.hpp"

namespace cvtele {

template <typename Real>
using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <typename Real>
using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Standard symplectic form for m modes.
template <typename Real>
RMatrix<Real> symplectic_form(int modes) {
  RMatrix<Real> omega = RMatrix<Real>::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = Real(1);
    omega(2 * k + 1, 2 * k) = Real(-1);
  }
  return omega;
}

/// Symplectic eigenvalues of a covariance matrix, ascending: the moduli of the
/// eigenvalues of the Hermitian matrix i V^{1/2} Omega V^{1/2}. A covariance
/// that is not positive definite returns zeros, which fails any uncertainty check.
template <typename Real>
RVector<Real> symplectic_eigenvalues(const RMatrix<Real>& cov) {
  const int modes = static_cast<int>(cov.rows()) / 2;
  Eigen::SelfAdjointEigenSolver<RMatrix<Real>> sv(cov);
  if (sv.info() != Eigen::Success) throw Error(Errc::no_convergence, "covariance spectrum");
  if (sv.eigenvalues().minCoeff() <= Real(0)) return RVector<Real>::Zero(modes);
  const RMatrix<Real> root = sv.operatorSqrt();
  const Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic> h =
      Complex<Real>(0, 1) * (root * symplectic_form<Real>(modes) * root).template cast<Complex<Real>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>> es(
      h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(Errc::no_convergence, "symplectic spectrum");
  // Eigenvalues come in pairs +-nu, sorted ascending; the top half are the nu.
  return es.eigenvalues().tail(modes);
}

template <typename Real>
class GaussianState {
 public:
  GaussianState(RVector<Real> mean, RMatrix<Real> cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() % 2 != 0 || mean_.size() == 0 || cov_.rows() != mean_.size() ||
        cov_.cols() != mean_.size())
      throw Error(Errc::shape_mismatch, "mean and covariance must describe whole modes");
    const Real scale = std::max(cov_.cwiseAbs().maxCoeff(), Real(1));
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > Real(1e-12) * scale)
      throw Error(Errc::invalid_argument, "covariance matrix is not symmetric");
    // The spectrum of Omega V is only known to about eps |V|.
    const Real slack = Real(1e-10) + Real(64) * std::numeric_limits<Real>::epsilon() * scale;
    if (symplectic_eigenvalues(cov_).minCoeff() < Real(0.5) - slack)
      throw Error(Errc::invalid_argument, "covariance violates the uncertainty relation");
  }

  /// Skips the numerical uncertainty check, for states that are physical by
  /// construction but whose covariance is too ill-conditioned to verify
  /// (two-mode squeezing with e^{4r} beyond ~1/eps).
  struct Exact {};
  GaussianState(RVector<Real> mean, RMatrix<Real> cov, Exact)
      : mean_(std::move(mean)), cov_(std::move(cov)) {}

  int modes() const { return static_cast<int>(mean_.size()) / 2; }
  const RVector<Real>& mean() const { return mean_; }
  const RMatrix<Real>& cov() const { return cov_; }

  /// Mean occupation of mode k: (tr V_k + |d_k|^2)/2 - 1/2.
  Real photon_number(int k) const {
    const auto block = cov_.template block<2, 2>(2 * k, 2 * k);
    const auto d = mean_.template segment<2>(2 * k);
    return (block.trace() + d.squaredNorm()) / Real(2) - Real(0.5);
  }

 private:
  RVector<Real> mean_;
  RMatrix<Real> cov_;
};

template <typename Real>
RVector<Real> coherent_quadratures(Complex<Real> beta) {
  RVector<Real> d(2);
  d << std::sqrt(Real(2)) * beta.real(), std::sqrt(Real(2)) * beta.imag();
  return d;
}

template <typename Real>
GaussianState<Real> coherent_gaussian(Complex<Real> beta) {
  return GaussianState<Real>(coherent_quadratures(beta), RMatrix<Real>::Identity(2, 2) / Real(2));
}

/// Two-mode squeezed vacuum: diagonal blocks cosh(2r)/2 I, off-diagonal sinh(2r)/2 diag(1, -1).
template <typename Real>
GaussianState<Real> epr_gaussian(Real r) {
  if (!(r >= Real(0))) throw Error(Errc::invalid_argument, "squeezing r must be >= 0");
  const Real c = std::cosh(Real(2) * r) / Real(2), s = std::sinh(Real(2) * r) / Real(2);
  RMatrix<Real> v(4, 4);
  v << c, 0, s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, -s, 0, c;
  return GaussianState<Real>(RVector<Real>::Zero(4), std::move(v), typename GaussianState<Real>::Exact{});
}

struct TeleportParams {
  double r = 0.0;
  double gain = 1.0;

  TeleportParams() = default;
  TeleportParams(double r_, double gain_ = 1.0) : r(r_), gain(gain_) {
    if (!(r >= 0)) throw Error(Errc::invalid_argument, "squeezing r must be >= 0");
    if (!(gain >= 0)) throw Error(Errc::invalid_argument, "gain must be >= 0");
  }
};

/// Output of the teleporter for input |beta>.
///
/// Alice's dual-homodyne Bell measurement on (in, A) reads x_in - x_A and
/// p_in + p_A; Bob displaces B by gain times those values. As a linear map on
/// (x_in, p_in, x_A, p_A, x_B, p_B):
///   x_out = g x_in - g x_A + x_B,   p_out = g p_in + g p_A + p_B.
/// At g = 1 the output covariance is (1/2 + e^{-2r}) I.
template <typename Real>
GaussianState<Real> bk_teleport_coherent(Complex<Real> beta, const TeleportParams& p) {
  const Real g = Real(p.gain);
  const auto epr = epr_gaussian(Real(p.r));
  RVector<Real> mean = RVector<Real>::Zero(6);
  mean.head(2) = coherent_quadratures(beta);
  RMatrix<Real> cov = RMatrix<Real>::Zero(6, 6);
  cov.topLeftCorner(2, 2) = RMatrix<Real>::Identity(2, 2) / Real(2);
  cov.bottomRightCorner(4, 4) = epr.cov();

  RMatrix<Real> m(2, 6);
  m << g, 0, -g, 0, 1, 0,
       0, g, 0, g, 0, 1;
  RMatrix<Real> out = m * cov * m.transpose();
  out = (out + out.transpose()) / Real(2);
  return GaussianState<Real>(m * mean, std::move(out));
}

/// <beta|rho|beta> for a single-mode Gaussian rho with mean d and covariance V:
/// exp(-delta^T (V + I/2)^{-1} delta / 2) / sqrt(det(V + I/2)), delta = d - d_beta.
template <typename Real>
Real coherent_vs_gaussian_fidelity(Complex<Real> beta, const GaussianState<Real>& st) {
  if (st.modes() != 1) throw Error(Errc::shape_mismatch, "fidelity needs a single-mode state");
  const RMatrix<Real> s = st.cov() + RMatrix<Real>::Identity(2, 2) / Real(2);
  const RVector<Real> delta = st.mean() - coherent_quadratures(beta);
  const Real quad = delta.dot(s.ldlt().solve(delta));
  return std::exp(-quad / Real(2)) / std::sqrt(s.determinant());
}

/// Unit-gain fidelity over an r grid, evaluated through the Gaussian calculus
/// for input |beta>. At g = 1 this is 1/(1 + e^{-2r}) for every beta.
template <typename Real>
std::vector<Real> fidelity_vs_r_curve(std::span<const Real> r_grid, Real gain,
                                      Complex<Real> beta = {}) {
  std::vector<Real> f;
  f.reserve(r_grid.size());
  for (Real r : r_grid) {
    if (!(r >= Real(0))) throw Error(Errc::invalid_argument, "r grid must be nonnegative");
    f.push_back(coherent_vs_gaussian_fidelity(beta, bk_teleport_coherent(beta, {double(r), double(gain)})));
  }
  return f;
}

/// Fock-space evaluation of the unit-gain output fidelity: the displaced
/// thermal state D(beta) rho_th(nbar = e^{-2r}) D(beta)^dagger scored against
/// the truncated |beta>.
template <typename Real>
Real fock_cross_check(Complex<Real> beta, Real r, int N) {
  if (!(r >= Real(0))) throw Error(Errc::invalid_argument, "squeezing r must be >= 0");
  const Real nbar = std::exp(Real(-2) * r);
  const auto rho = displaced(thermal_state<Real>(nbar, N), beta);
  const auto in = coherent_fock<Real>(beta, N);
  if (std::abs(rho.trace() - Real(1)) > Real(kDefaultLeakTolerance))
    throw Error(Errc::truncation_too_small,
                "displaced thermal state loses " + std::to_string(double(Real(1) - rho.trace())) +
                    " of its trace at N=" + std::to_string(N));
  return rho.expectation(in);
}

}  // namespace cvtele
