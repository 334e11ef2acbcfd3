#pragma once

// Truncated Fock-space numerics for a single bosonic mode (and the diagonal
// two-mode squeezed vacuum). Basis states |0>..|N>; all types are templated
// on the real scalar so the same code runs in double and long double.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "cvtele/error.hpp"

namespace cvtele {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using CVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr int kDefaultTruncation = 60;
inline constexpr double kDefaultLeakTolerance = 1e-10;

template <typename Real>
class FockVector {
 public:
  FockVector() = default;
  explicit FockVector(CVector<Real> amps, Real leak = Real(0))
      : amps_(std::move(amps)), leak_(leak) {
    if (amps_.size() == 0) throw Error(Errc::invalid_argument, "FockVector needs N >= 0");
  }

  static FockVector basis(int n, int N) {
    if (n < 0 || n > N) throw Error(Errc::invalid_argument, "basis index outside truncation");
    CVector<Real> v = CVector<Real>::Zero(N + 1);
    v(n) = Real(1);
    return FockVector(std::move(v));
  }

  int truncation() const { return static_cast<int>(amps_.size()) - 1; }
  const CVector<Real>& amplitudes() const { return amps_; }
  Complex<Real> operator[](int n) const { return amps_(n); }
  Real norm_squared() const { return amps_.squaredNorm(); }
  /// Probability discarded by the truncation, as reported by the constructor.
  Real leak() const { return leak_; }

  /// <this|other>
  Complex<Real> inner(const FockVector& other) const {
    if (other.truncation() != truncation())
      throw Error(Errc::shape_mismatch, "inner product across different truncations");
    return amps_.dot(other.amps_);
  }

  FockVector normalized() const { return FockVector(amps_.normalized()); }

 private:
  CVector<Real> amps_;
  Real leak_ = Real(0);
};

/// Square complex matrix that is Hermitian to within 1e-12 of its largest entry.
template <typename Real>
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(CMatrix<Real> m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
      throw Error(Errc::shape_mismatch, "operator must be square and non-empty");
    const Real scale = m_.cwiseAbs().maxCoeff();
    const Real defect = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (defect > Real(1e-12) * scale)
      throw Error(Errc::not_hermitian, "hermiticity defect " + std::to_string(double(defect)));
  }

  /// Builds (m + m^dagger)/2; use for products that are Hermitian only up to rounding.
  static HermitianOperator symmetrized(const CMatrix<Real>& m) {
    CMatrix<Real> h = (m + m.adjoint()) / Real(2);
    return HermitianOperator(std::move(h));
  }

  static HermitianOperator projector(const FockVector<Real>& v) {
    return HermitianOperator(v.amplitudes() * v.amplitudes().adjoint());
  }

  static HermitianOperator identity(int N) {
    return HermitianOperator(CMatrix<Real>::Identity(N + 1, N + 1));
  }

  int truncation() const { return static_cast<int>(m_.rows()) - 1; }
  const CMatrix<Real>& matrix() const { return m_; }
  Complex<Real> operator()(int i, int j) const { return m_(i, j); }
  Real trace() const { return m_.trace().real(); }

  Eigen::Matrix<Real, Eigen::Dynamic, 1> eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(m_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(Errc::no_convergence, "Hermitian eigenvalue solve");
    return es.eigenvalues();
  }

  /// Smallest eigenvalue >= -rel_tol * largest eigenvalue.
  bool is_psd(Real rel_tol = Real(1e-10)) const {
    const auto ev = eigenvalues();
    const Real top = std::max(ev(ev.size() - 1), Real(0));
    return ev(0) >= -rel_tol * top;
  }

  /// <psi|this|psi>
  Real expectation(const FockVector<Real>& psi) const {
    if (psi.truncation() != truncation())
      throw Error(Errc::shape_mismatch, "state and operator truncations differ");
    return psi.amplitudes().dot(m_ * psi.amplitudes()).real();
  }

 private:
  CMatrix<Real> m_;
};

namespace detail {

// e^{-|beta|^2/2} beta^n / sqrt(n!) for n = 0..N, by the multiplicative recurrence.
template <typename Real>
CVector<Real> coherent_amplitudes(Complex<Real> beta, int N) {
  CVector<Real> a(N + 1);
  a(0) = Complex<Real>(std::exp(-std::norm(beta) / Real(2)), Real(0));
  for (int n = 0; n < N; ++n) a(n + 1) = a(n) * beta / std::sqrt(Real(n + 1));
  return a;
}

}  // namespace detail

/// Coherent state |beta> truncated at N. Throws TruncationTooSmall when the
/// discarded probability exceeds leak_tolerance.
template <typename Real>
FockVector<Real> coherent_fock(Complex<Real> beta, int N,
                               Real leak_tolerance = Real(kDefaultLeakTolerance)) {
  if (N < 0) throw Error(Errc::invalid_argument, "truncation N must be >= 0");
  CVector<Real> a = detail::coherent_amplitudes(beta, N);
  const Real leak = std::max(Real(0), Real(1) - a.squaredNorm());
  if (leak > leak_tolerance)
    throw Error(Errc::truncation_too_small,
                "coherent state |beta|=" + std::to_string(double(std::abs(beta))) + " at N=" +
                    std::to_string(N) + " leaks " + std::to_string(double(leak)));
  return FockVector<Real>(std::move(a), leak);
}

/// Fock matrix elements <m|D(nu)|n> for m < rows, n < cols.
///
/// Lower triangle: e^{-x/2} sqrt(n!/m!) nu^{m-n} L_n^{(m-n)}(x), x = |nu|^2; the
/// upper triangle is the same with nu -> -conj(nu). Each diagonal band is
/// generated by the Laguerre three-term recurrence rescaled by sqrt(n!/(n+k)!),
/// so no factorial or raw Laguerre value is ever formed. The entries are exact
/// for any rows/cols; only products of truncated blocks lose accuracy near the
/// border.
template <typename Real>
CMatrix<Real> displacement_block(Complex<Real> nu, int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw Error(Errc::invalid_argument, "empty displacement block");
  CMatrix<Real> d = CMatrix<Real>::Zero(rows, cols);
  const Real x = std::norm(nu);
  const int kmax = std::max(rows, cols);
  const CVector<Real> lower_start = detail::coherent_amplitudes(nu, kmax);
  const CVector<Real> upper_start = detail::coherent_amplitudes(-std::conj(nu), kmax);

  auto band = [&](int k, Complex<Real> start, auto&& store) {
    // t_n = element on band k at column (or row) n.
    Complex<Real> prev(0), cur = start;
    for (int n = 0;; ++n) {
      if (!store(n, cur)) break;
      const Real nn = Real(n), kk = Real(k);
      const Complex<Real> next =
          ((Real(2) * nn + Real(1) + kk - x) * cur - std::sqrt(nn * (nn + kk)) * prev) /
          std::sqrt((nn + Real(1)) * (nn + kk + Real(1)));
      prev = cur;
      cur = next;
    }
  };

  for (int k = 0; k < rows; ++k) {
    band(k, lower_start(k), [&](int n, Complex<Real> v) {
      if (n + k >= rows || n >= cols) return false;
      d(n + k, n) = v;
      return true;
    });
  }
  for (int k = 1; k < cols; ++k) {
    band(k, upper_start(k), [&](int n, Complex<Real> v) {
      if (n >= rows || n + k >= cols) return false;
      d(n, n + k) = v;
      return true;
    });
  }
  return d;
}

/// (N+1)x(N+1) truncation of the displacement operator D(nu).
template <typename Real>
CMatrix<Real> displacement_matrix(Complex<Real> nu, int N) {
  if (N < 0) throw Error(Errc::invalid_argument, "truncation N must be >= 0");
  return displacement_block(nu, N + 1, N + 1);
}

/// Size of the top-left block of displacement_matrix(nu, N) on which D D^dagger
/// is the identity to about 1e-8. Row m of D(nu) spreads over roughly
/// 2|nu|sqrt(m) neighbouring levels, so the margin grows with |nu|.
inline int unitary_block_size(double nu_abs, int N) {
  const int margin = static_cast<int>(std::ceil(2.0 * nu_abs * std::sqrt(double(N)) + 10.0));
  return std::max(0, N + 1 - margin);
}

/// D(nu) rho D(nu)^dagger, with the inner sum running over the operator's own
/// truncation. Accurate when rho's weight near the border is negligible.
template <typename Real>
HermitianOperator<Real> displaced(const HermitianOperator<Real>& rho, Complex<Real> nu) {
  const int dim = rho.truncation() + 1;
  const CMatrix<Real> d = displacement_block(nu, dim, dim);
  return HermitianOperator<Real>::symmetrized(d * rho.matrix() * d.adjoint());
}

/// Thermal state with mean occupation nbar, diagonal weights nbar^n / (1+nbar)^{n+1}.
template <typename Real>
HermitianOperator<Real> thermal_state(Real nbar, int N,
                                      Real leak_tolerance = Real(kDefaultLeakTolerance)) {
  if (nbar < Real(0)) throw Error(Errc::invalid_argument, "thermal occupation must be >= 0");
  CMatrix<Real> rho = CMatrix<Real>::Zero(N + 1, N + 1);
  const Real ratio = nbar / (Real(1) + nbar);
  Real w = Real(1) / (Real(1) + nbar);
  for (int n = 0; n <= N; ++n, w *= ratio) rho(n, n) = w;
  const Real leak = std::pow(ratio, Real(N + 1));
  if (leak > leak_tolerance)
    throw Error(Errc::truncation_too_small,
                "thermal state nbar=" + std::to_string(double(nbar)) + " leaks " +
                    std::to_string(double(leak)));
  return HermitianOperator<Real>(std::move(rho));
}

/// Two-mode squeezed vacuum sum_n tanh^n(r)/cosh(r) |n>|n>, stored by its
/// Schmidt coefficients.
template <typename Real>
class EprState {
 public:
  EprState(CVector<Real> schmidt, Real r, Real leak)
      : schmidt_(std::move(schmidt)), r_(r), leak_(leak) {}

  int truncation() const { return static_cast<int>(schmidt_.size()) - 1; }
  Real squeezing() const { return r_; }
  Real leak() const { return leak_; }
  const CVector<Real>& schmidt() const { return schmidt_; }
  Real norm_squared() const { return schmidt_.squaredNorm(); }

  /// Amplitudes over the product basis, index a*(N+1)+b for |a>_A|b>_B.
  CVector<Real> amplitudes() const {
    const int dim = truncation() + 1;
    CVector<Real> full = CVector<Real>::Zero(dim * dim);
    for (int n = 0; n < dim; ++n) full(n * dim + n) = schmidt_(n);
    return full;
  }

  Real mean_photon_number() const {
    Real s(0);
    for (int n = 0; n < schmidt_.size(); ++n) s += Real(n) * std::norm(schmidt_(n));
    return s;
  }

  /// Either mode's reduced density operator (thermal with nbar = sinh^2 r).
  HermitianOperator<Real> reduced() const {
    CMatrix<Real> rho = CMatrix<Real>::Zero(schmidt_.size(), schmidt_.size());
    for (int n = 0; n < schmidt_.size(); ++n) rho(n, n) = std::norm(schmidt_(n));
    return HermitianOperator<Real>(std::move(rho));
  }

 private:
  CVector<Real> schmidt_;
  Real r_;
  Real leak_;
};

template <typename Real>
EprState<Real> epr_fock(Real r, int N, Real leak_tolerance = Real(kDefaultLeakTolerance)) {
  if (!(r >= Real(0))) throw Error(Errc::invalid_argument, "squeezing r must be >= 0");
  if (N < 0) throw Error(Errc::invalid_argument, "truncation N must be >= 0");
  const Real t = std::tanh(r);
  CVector<Real> s(N + 1);
  s(0) = Real(1) / std::cosh(r);
  for (int n = 0; n < N; ++n) s(n + 1) = s(n) * t;
  // Geometric tail sum_{n>N} tanh^{2n} r / cosh^2 r.
  const Real leak = std::pow(t * t, Real(N + 1));
  if (leak > leak_tolerance)
    throw Error(Errc::truncation_too_small,
                "EPR state r=" + std::to_string(double(r)) + " leaks " + std::to_string(double(leak)));
  return EprState<Real>(std::move(s), r, leak);
}

template <typename Real>
struct Eigenpair {
  Real value;
  FockVector<Real> vector;
};

/// Largest eigenvalue and a unit eigenvector from a dense Hermitian solve.
///
/// Degenerate top eigenspaces resolve to the projection of the lowest-index
/// basis state with maximal overlap; the returned vector's largest-magnitude
/// component is made real and positive.
template <typename Real>
Eigenpair<Real> top_eigenpair(const HermitianOperator<Real>& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix<Real>> es(h.matrix());
  if (es.info() != Eigen::Success) throw Error(Errc::no_convergence, "Hermitian eigensolver failed");
  const auto& ev = es.eigenvalues();
  const Eigen::Index dim = ev.size();
  const Real top = ev(dim - 1);
  const Real scale = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<Real>::min());
  const Real tie_tol = Real(1e-12) * scale;

  Eigen::Index first = dim - 1;
  while (first > 0 && top - ev(first - 1) <= tie_tol) --first;

  CVector<Real> v;
  if (first == dim - 1) {
    v = es.eigenvectors().col(dim - 1);
  } else {
    const CMatrix<Real> basis = es.eigenvectors().rightCols(dim - first);
    const CMatrix<Real> proj = basis * basis.adjoint();
    Eigen::Index best = 0;
    Real best_norm = proj.col(0).norm();
    for (Eigen::Index k = 1; k < dim; ++k) {
      const Real nk = proj.col(k).norm();
      if (nk > best_norm * (Real(1) + Real(1e-12))) {
        best = k;
        best_norm = nk;
      }
    }
    v = proj.col(best) / best_norm;
  }

  Eigen::Index lead = 0;
  Real lead_abs = std::abs(v(0));
  for (Eigen::Index k = 1; k < dim; ++k) {
    const Real ak = std::abs(v(k));
    if (ak > lead_abs * (Real(1) + Real(1e-12))) {
      lead = k;
      lead_abs = ak;
    }
  }
  v *= std::conj(v(lead)) / lead_abs;
  v(lead) = Complex<Real>(lead_abs, Real(0));

  const Real residual = (h.matrix() * v - top * v).norm();
  if (residual > Real(1e-9) * scale)
    throw Error(Errc::no_convergence, "eigenpair residual " + std::to_string(double(residual)));
  return {top, FockVector<Real>(std::move(v))};
}

/// <psi|rho|psi> for a normalized pure state and a density operator.
template <typename Real>
Real fidelity_pure_mixed(const FockVector<Real>& psi, const HermitianOperator<Real>& rho) {
  if (psi.truncation() != rho.truncation())
    throw Error(Errc::shape_mismatch, "state truncation " + std::to_string(psi.truncation()) +
                                          " vs operator truncation " +
                                          std::to_string(rho.truncation()));
  if (std::abs(psi.norm_squared() - Real(1)) > Real(1e-9))
    throw Error(Errc::invalid_argument, "input state is not normalized");
  if (std::abs(rho.trace() - Real(1)) > Real(1e-9))
    throw Error(Errc::invalid_argument, "density operator trace differs from 1");
  if (!rho.is_psd()) throw Error(Errc::invalid_argument, "density operator is not positive");
  return rho.expectation(psi);
}

}  // namespace cvtele
