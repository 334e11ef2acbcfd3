#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "cvtele/error.hpp"

namespace cvtele {

template <typename Real>
struct QuadratureRule {
  Eigen::Matrix<Real, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Real, Eigen::Dynamic, 1> weights;
};

/// n-point Gauss-Legendre rule on [lo, hi] (Golub-Welsch).
template <typename Real>
QuadratureRule<Real> gauss_legendre(int n, Real lo, Real hi) {
  if (n < 1) throw Error(Errc::invalid_argument, "quadrature needs at least one node");
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  Mat jacobi = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Real kk = Real(k);
    const Real b = kk / std::sqrt(Real(4) * kk * kk - Real(1));
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  if (es.info() != Eigen::Success) throw Error(Errc::no_convergence, "Golub-Welsch eigensolve");
  const Real half = (hi - lo) / Real(2), mid = (hi + lo) / Real(2);
  QuadratureRule<Real> rule;
  rule.nodes = (es.eigenvalues().array() * half + mid).matrix();
  rule.weights = (es.eigenvectors().row(0).transpose().array().square() * Real(2) * half).matrix();
  return rule;
}

}  // namespace cvtele
