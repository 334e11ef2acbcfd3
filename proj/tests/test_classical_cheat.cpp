#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "cvtele/classical_cheat.hpp"

using namespace cvtele;
using cd = std::complex<double>;

namespace {

// Closed-form average fidelity of the rule |A + g(alpha - A)> against the prior
// CN(m, 1/lambda) under heterodyne noise CN(0, 1). The overlap argument
// label - beta is complex Gaussian with mean mu = (1-g)(A-m) and
// E|.-mu|^2 = s = (1-g)^2/lambda + g^2, and E exp(-|Z|^2) = exp(-|mu|^2/(1+s))/(1+s).
double gain_fidelity_oracle(double lambda, double g, cd mean = {}, cd anchor = {}) {
  const double s = (1 - g) * (1 - g) / lambda + g * g;
  const cd mu = (1 - g) * (anchor - mean);
  return std::exp(-std::norm(mu) / (1 + s)) / (1 + s);
}

bool within(const Estimate& e, double target, double k = 3.0) {
  return std::abs(e.mean - target) <= k * e.std_error;
}

}  // namespace

TEST_CASE("gain oracle reproduces the optimal bound algebraically") {
  for (double lambda : {0.01, 0.3, 1.0, 4.0})
    CHECK(gain_fidelity_oracle(lambda, 1 / (1 + lambda)) ==
          doctest::Approx((1 + lambda) / (2 + lambda)).epsilon(1e-14));
  CHECK(gain_fidelity_oracle(1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("heterodyne_sample: mean, spread and determinism") {
  const cd beta(1, 1);
  const SeedStream seeds{11, 0};
  const auto re = parallel_mean(1'000'000, seeds, 1, [&](Engine& e) {
    return heterodyne_sample(beta, e).real();
  });
  const auto im = parallel_mean(1'000'000, seeds.substream(1), 1, [&](Engine& e) {
    return heterodyne_sample(beta, e).imag();
  });
  CHECK(within(re, 1.0));
  CHECK(within(im, 1.0));
  const auto spread = parallel_mean(1'000'000, seeds.substream(2), 1, [&](Engine& e) {
    return std::norm(heterodyne_sample(beta, e) - beta);
  });
  CHECK(within(spread, 1.0));

  Engine a = seeds.engine(3), b = seeds.engine(3);
  for (int i = 0; i < 100; ++i) CHECK(heterodyne_sample(beta, a) == heterodyne_sample(beta, b));
}

TEST_CASE("prior_sample: second moment and centre") {
  const SeedStream seeds{5, 0};
  for (double lambda : {1.0, 2.0}) {
    const GaussianPrior prior(lambda);
    const auto m2 = parallel_mean(1'000'000, seeds.substream(std::uint64_t(lambda)), 1,
                                  [&](Engine& e) { return std::norm(prior_sample(prior, e)); });
    CHECK(within(m2, 1.0 / lambda));
  }
  const GaussianPrior shifted(1.0, cd(2, 0));
  const auto re = parallel_mean(1'000'000, seeds.substream(9), 1,
                                [&](Engine& e) { return prior_sample(shifted, e).real(); });
  const auto im = parallel_mean(1'000'000, seeds.substream(10), 1,
                                [&](Engine& e) { return prior_sample(shifted, e).imag(); });
  CHECK(within(re, 2.0));
  CHECK(within(im, 0.0));

  CHECK_THROWS_AS(GaussianPrior(0.0), Error);
  try {
    GaussianPrior(-1.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::lambda_non_positive);
  }
}

TEST_CASE("reprepare: gain rules") {
  const auto vac = reprepare(CheatStrategy::gain(0.0), cd(3, -2), 60);
  CHECK(std::abs(vac[0] - cd(1, 0)) < 1e-15);
  const auto same = reprepare(CheatStrategy::gain(1.0), cd(1, 0), 60);
  CHECK((same.amplitudes() - coherent_fock<double>(cd(1, 0), 60).amplitudes()).norm() < 1e-15);
  const auto opt = reprepare(CheatStrategy::optimal(GaussianPrior(1.0)), cd(2, 0), 60);
  CHECK((opt.amplitudes() - coherent_fock<double>(cd(1, 0), 60).amplitudes()).norm() < 1e-15);
  CHECK_THROWS_AS(CheatStrategy::gain(-0.1), Error);
}

TEST_CASE("mc_average_fidelity: optimal gain hits (1+lambda)/(2+lambda)") {
  const SeedStream seeds{2024, 0};
  const GaussianPrior one(1.0);
  const auto f1 = mc_average_fidelity(one, CheatStrategy::optimal(one), 1'000'000, seeds);
  CHECK(within(f1, 2.0 / 3.0));

  const GaussianPrior wide(0.01);
  const auto f2 = mc_average_fidelity(wide, CheatStrategy::optimal(wide), 1'000'000,
                                      seeds.substream(1));
  CHECK(within(f2, 1.01 / 2.01));
  CHECK(f2.std_error < 5e-4);

  const auto naive = mc_average_fidelity(one, CheatStrategy::gain(1.0), 1'000'000,
                                         seeds.substream(2));
  CHECK(naive.mean < 2.0 / 3.0 - 3 * naive.std_error);
  CHECK(within(naive, gain_fidelity_oracle(1.0, 1.0)));
}

TEST_CASE("mc_average_fidelity: lambda sweep and gain optimality") {
  const SeedStream seeds{77, 0};
  std::uint64_t id = 0;
  for (double lambda : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
    const GaussianPrior prior(lambda);
    const double gopt = 1 / (1 + lambda);
    const auto best = mc_average_fidelity(prior, CheatStrategy::gain(gopt), 1'000'000,
                                          seeds.substream(id++));
    CHECK(within(best, fmax_analytic(lambda)));
    for (double g : {0.5 * gopt, 1.0, 1.5 * gopt}) {
      if (std::abs(g - gopt) < 1e-12) continue;
      const auto other = mc_average_fidelity(prior, CheatStrategy::gain(g), 1'000'000,
                                             seeds.substream(id++));
      CHECK(within(other, gain_fidelity_oracle(lambda, g)));
      CHECK(best.mean - other.mean > 3 * std::hypot(best.std_error, other.std_error));
    }
  }
}

TEST_CASE("mc_average_fidelity: thread count does not change the result") {
  const GaussianPrior prior(0.5);
  const SeedStream seeds{99, 3};
  const auto one = mc_average_fidelity(prior, CheatStrategy::optimal(prior), 200'000, seeds,
                                       {.threads = 1});
  const auto four = mc_average_fidelity(prior, CheatStrategy::optimal(prior), 200'000, seeds,
                                        {.threads = 4});
  CHECK(one.mean == four.mean);
  CHECK(one.std_error == four.std_error);
  CHECK_THROWS_AS(mc_average_fidelity(prior, CheatStrategy::optimal(prior), 50, seeds), Error);
}

TEST_CASE("mc_average_fidelity: Fock-space scoring agrees with the exact overlap") {
  const GaussianPrior prior(2.0);
  const SeedStream seeds{4, 1};
  const auto rule = CheatStrategy::optimal(prior);
  const auto exact = mc_average_fidelity(prior, rule, 20'000, seeds);
  const auto fock = mc_average_fidelity_fock(prior, rule, 20'000, seeds);
  // Same draws, so only truncation error separates them.
  CHECK(std::abs(exact.mean - fock.mean) < 1e-10);

  // Bob preparing the top eigenvector of O_alpha is the same rule.
  const auto eig_rule = CheatStrategy::custom([&](cd alpha) {
    return top_eigenpair(build_O_alpha<double>(alpha, prior.lambda, 60)).vector;
  });
  const auto eig = mc_average_fidelity(prior, eig_rule, 300, seeds.substream(8));
  const auto ref = mc_average_fidelity(prior, rule, 300, seeds.substream(8));
  CHECK(std::abs(eig.mean - ref.mean) < 1e-8);
}

TEST_CASE("fmax_analytic") {
  CHECK(fmax_analytic(0.0) == 0.5);
  CHECK(fmax_analytic(2.0) == doctest::Approx(0.75));
  CHECK(fmax_analytic(1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(fmax_analytic(1e9) == doctest::Approx(1.0).epsilon(1e-8));
  double prev = 0.5;
  for (double lambda = 1e-3; lambda < 1e3; lambda *= 1.3) {
    const double f = fmax_analytic(lambda);
    CHECK(f > prev);
    CHECK(f < 1.0);
    prev = f;
  }
  CHECK_THROWS_AS(fmax_analytic(-0.1), Error);
  try {
    fmax_analytic(-1);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::lambda_negative);
  }
}

TEST_CASE("build_O_alpha: alpha = 0 is the diagonal P operator") {
  for (double lambda : {0.2, 1.0}) {
    const auto o = build_O_alpha<double>(cd(0, 0), lambda, 30);
    const auto p = heterodyne_p_operator<double>(lambda, 30);
    CHECK((o.matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(p(0, 0).real() == doctest::Approx(std::numbers::pi / (2 + lambda)));
    CHECK(p(3, 3).real() == doctest::Approx(std::numbers::pi * std::pow(2 + lambda, -4)));
    const auto oq = build_O_alpha<double>(cd(0, 0), lambda, 30, OperatorMethod::quadrature);
    CHECK((oq.matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("build_O_alpha: closed form and quadrature agree") {
  for (auto [alpha, lambda] : {std::pair{cd(1, 1), 0.5}, std::pair{cd(-0.5, 1.5), 0.2},
                               std::pair{cd(2, 0), 1.0}}) {
    const auto closed = build_O_alpha<double>(alpha, lambda, 60);
    const auto quad = build_O_alpha<double>(alpha, lambda, 60, OperatorMethod::quadrature);
    CHECK((closed.matrix() - quad.matrix()).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(closed.is_psd());
    CHECK(quad.is_psd());
  }
  CHECK_THROWS_AS(build_O_alpha<double>(cd(1, 0), 0.0, 20), Error);
  CHECK_THROWS_AS(build_O_alpha<double>(cd(9, 0), 0.1, 20), Error);
}

TEST_CASE("verify_optimal_eigenvector") {
  const auto vac = verify_optimal_eigenvector(cd(0, 0), 1.0, 60);
  CHECK(vac.mu1 == doctest::Approx(std::numbers::pi / 3).epsilon(1e-12));
  CHECK(vac.match_fidelity == doctest::Approx(1.0).epsilon(1e-12));

  const auto two = verify_optimal_eigenvector(cd(2, 0), 1.0, 60);
  CHECK(two.match_fidelity >= 0.999);
  CHECK((two.eigenvector.amplitudes() - coherent_fock<double>(cd(1, 0), 60).amplitudes())
            .cwiseAbs()
            .maxCoeff() < 1e-8);

  const auto three = verify_optimal_eigenvector(cd(3, 0), 0.2, 60);
  CHECK(std::abs(three.mu1 / (std::exp(9 / 1.2) * std::numbers::pi / 2.2) - 1) <= 1e-5);

  for (double re : {-3.0, -1.5, 0.0, 1.0, 2.5})
    for (double im : {-1.0, 0.0, 2.0}) {
      const cd alpha(re, im);
      if (std::abs(alpha) > 3) continue;
      for (double lambda : {0.1, 0.5, 1.0, 2.0}) {
        const auto c = verify_optimal_eigenvector(alpha, lambda, 60);
        CHECK(c.match_fidelity >= 0.999);
        CHECK(std::abs(c.mu1 / c.mu1_expected - 1) <= 1e-6);
      }
    }
}

TEST_CASE("verify_optimal_eigenvector through the quadrature operator") {
  const auto c = verify_optimal_eigenvector(cd(1, -1), 0.5, 60, OperatorMethod::quadrature);
  CHECK(std::abs(c.mu1 / c.mu1_expected - 1) <= 1e-6);
  CHECK(c.match_fidelity >= 0.999);
}

TEST_CASE("mean_shift_invariance") {
  const SeedStream seeds{31, 0};
  const auto centred = mean_shift_invariance(cd(0, 0), 1.0, 400'000, seeds);
  const auto plain = mc_average_fidelity(GaussianPrior(1.0), CheatStrategy::gain(0.5), 400'000,
                                         seeds);
  CHECK(centred.mean == plain.mean);

  const auto shifted = mean_shift_invariance(cd(2, 0), 1.0, 1'000'000, seeds.substream(1));
  CHECK(within(shifted, 2.0 / 3.0));
  const auto unshifted =
      mean_shift_invariance(cd(2, 0), 1.0, 1'000'000, seeds.substream(2), false);
  CHECK(unshifted.mean < 2.0 / 3.0 - 3 * unshifted.std_error);
  CHECK(within(unshifted, gain_fidelity_oracle(1.0, 0.5, cd(2, 0), cd(0, 0))));
}
