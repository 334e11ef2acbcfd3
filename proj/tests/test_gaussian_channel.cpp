#include <cmath>
#include <vector>

#include "doctest.h"
#include "cvtele/gaussian_channel.hpp"

using namespace cvtele;
using cd = std::complex<double>;
using Mat = RMatrix<double>;

namespace {

// Two-mode symplectic spectrum from the invariants det V and
// Delta = det A + det B + 2 det C.
std::pair<double, double> two_mode_spectrum(const Mat& v) {
  const double delta = v.block<2, 2>(0, 0).determinant() + v.block<2, 2>(2, 2).determinant() +
                       2 * v.block<2, 2>(0, 2).determinant();
  const double det = v.determinant();
  const double disc = std::sqrt(std::max(delta * delta - 4 * det, 0.0));
  return {std::sqrt((delta - disc) / 2), std::sqrt((delta + disc) / 2)};
}

double unit_gain_oracle(double r) { return 1.0 / (1.0 + std::exp(-2 * r)); }

}  // namespace

TEST_CASE("epr_gaussian covariance and spectrum") {
  const auto vac = epr_gaussian(0.0);
  CHECK((vac.cov() - Mat::Identity(4, 4) / 2).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(vac.modes() == 2);

  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    const auto st = epr_gaussian(r);
    const auto nu = symplectic_eigenvalues(st.cov());
    const auto [lo, hi] = two_mode_spectrum(st.cov());
    CHECK(nu(0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(nu(1) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(lo == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(hi == doctest::Approx(0.5).epsilon(1e-8));
  }
  CHECK(epr_gaussian(0.5).photon_number(0) == doctest::Approx(0.2715403).epsilon(1e-7));
  CHECK_THROWS_AS(epr_gaussian(-0.1), Error);
}

TEST_CASE("epr photon number agrees with the Fock form") {
  for (int k = 0; k <= 20; ++k) {
    const double r = k / 20.0;
    const auto g = epr_gaussian(r);
    const auto f = epr_fock(r, 80);
    CHECK(std::abs(g.photon_number(0) - f.mean_photon_number()) < 1e-9);
    CHECK(std::abs(g.photon_number(1) - f.mean_photon_number()) < 1e-9);
  }
}

TEST_CASE("GaussianState validation") {
  Mat bad = Mat::Identity(2, 2) * 0.4;
  CHECK_THROWS_AS(GaussianState<double>(RVector<double>::Zero(2), bad), Error);
  Mat asym = Mat::Identity(2, 2) / 2;
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(GaussianState<double>(RVector<double>::Zero(2), asym), Error);
  try {
    GaussianState<double>(RVector<double>::Zero(3), Mat::Identity(3, 3));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::shape_mismatch);
  }
  // Squeezed vacuum is allowed: det = 1/4.
  Mat sq(2, 2);
  sq << 0.5 * std::exp(-1.0), 0, 0, 0.5 * std::exp(1.0);
  CHECK_NOTHROW(GaussianState<double>(RVector<double>::Zero(2), sq));
}

TEST_CASE("bk_teleport_coherent at unit gain") {
  const cd beta(0.7, -1.3);
  for (double r : {0.0, 0.3, 1.0, 3.0}) {
    const auto out = bk_teleport_coherent(beta, {r, 1.0});
    CHECK(out.modes() == 1);
    CHECK((out.mean() - coherent_quadratures(beta)).cwiseAbs().maxCoeff() < 1e-14);
    const double expected = 0.5 + std::exp(-2 * r);
    CHECK(out.cov()(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(out.cov()(1, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(out.cov()(0, 1) == doctest::Approx(0.0));
    CHECK(out.cov()(0, 0) == out.cov()(1, 1));
  }
  CHECK(bk_teleport_coherent(beta, {0.0, 1.0}).cov()(0, 0) == doctest::Approx(1.5));
  const auto ideal = bk_teleport_coherent(beta, {15.0, 1.0});
  CHECK(std::abs(ideal.cov()(0, 0) - 0.5) < 1e-12);
}

TEST_CASE("bk_teleport_coherent at other gains") {
  const cd beta(1.0, 0.5);
  // Gain 0 discards the measurement: the output is Bob's reduced EPR mode.
  for (double r : {0.0, 0.4}) {
    const auto out = bk_teleport_coherent(beta, {r, 0.0});
    CHECK(out.mean().norm() == 0.0);
    CHECK(out.cov()(0, 0) == doctest::Approx(0.5 * std::cosh(2 * r)));
  }
  // Independent per-quadrature bookkeeping: g^2/2 + (1 + g^2) cosh(2r)/2 - g sinh(2r).
  for (double g : {0.3, 0.8, 1.4}) {
    for (double r : {0.0, 0.5, 1.2}) {
      const auto out = bk_teleport_coherent(beta, {r, g});
      const double v = g * g / 2 + (1 + g * g) * std::cosh(2 * r) / 2 - g * std::sinh(2 * r);
      CHECK(out.cov()(0, 0) == doctest::Approx(v).epsilon(1e-12));
      CHECK(out.cov()(1, 1) == doctest::Approx(v).epsilon(1e-12));
      CHECK(out.mean()(0) == doctest::Approx(g * std::sqrt(2.0)));
      CHECK(symplectic_eigenvalues(out.cov())(0) >= 0.5 - 1e-10);
    }
  }
  CHECK_THROWS_AS(TeleportParams(-1.0, 1.0), Error);
  CHECK_THROWS_AS(TeleportParams(0.0, -0.5), Error);
}

TEST_CASE("coherent_vs_gaussian_fidelity") {
  const cd beta(0.4, 0.9);
  CHECK(coherent_vs_gaussian_fidelity(beta, coherent_gaussian(beta)) == doctest::Approx(1.0).epsilon(1e-14));
  const cd delta(0.3, -0.2);
  CHECK(coherent_vs_gaussian_fidelity(beta, coherent_gaussian(beta + delta)) ==
        doctest::Approx(std::exp(-std::norm(delta))).epsilon(1e-13));
  CHECK(coherent_vs_gaussian_fidelity(beta, bk_teleport_coherent(beta, {0.0, 1.0})) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // Displaced thermal with the same mean: 1/(1 + nbar).
  for (double nbar : {0.0, 0.25, 3.0}) {
    GaussianState<double> th(coherent_quadratures(beta), Mat::Identity(2, 2) * (0.5 + nbar));
    CHECK(coherent_vs_gaussian_fidelity(beta, th) == doctest::Approx(1 / (1 + nbar)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(coherent_vs_gaussian_fidelity(beta, epr_gaussian(0.2)), Error);
}

TEST_CASE("fidelity_vs_r_curve") {
  std::vector<double> grid;
  for (int k = 0; k <= 200; ++k) grid.push_back(k * 0.02);
  const auto f = fidelity_vs_r_curve<double>(grid, 1.0);
  CHECK(f.front() == 0.5);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(f[k] == doctest::Approx(unit_gain_oracle(grid[k])).epsilon(1e-12));
    if (k > 0) CHECK(f[k] > f[k - 1]);
  }
  // Independent of beta at unit gain.
  const auto shifted = fidelity_vs_r_curve<double>(grid, 1.0, cd(1.5, -0.5));
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(shifted[k] == doctest::Approx(f[k]).epsilon(1e-12));

  const std::vector<double> probes{0.1613867, 2.0};
  const auto p = fidelity_vs_r_curve<double>(probes, 1.0);
  CHECK(p[0] == doctest::Approx(0.58).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.9820138).epsilon(1e-7));

  const std::vector<double> negative{-0.1};
  CHECK_THROWS_AS(fidelity_vs_r_curve<double>(negative, 1.0), Error);
}

TEST_CASE("fock_cross_check") {
  CHECK(std::abs(fock_cross_check(cd(0, 0), 0.0, 60) - 0.5) < 1e-6);
  CHECK(std::abs(fock_cross_check(cd(1, 0), 0.5, 60) - 0.7310586) < 1e-3);
  for (double r : {0.0, 0.2, 0.45, 0.7}) {
    for (cd beta : {cd(0, 0), cd(1, 0), cd(-0.6, 1.2), cd(2, 0), cd(0, 2)}) {
      const double gauss = coherent_vs_gaussian_fidelity(beta, bk_teleport_coherent(beta, {r, 1.0}));
      CHECK(std::abs(fock_cross_check(beta, r, 80) - gauss) < 1e-3);
    }
  }
  try {
    fock_cross_check(cd(2, 0), 0.0, 20);
    FAIL("expected TruncationTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::truncation_too_small);
  }
}
