#include "cvtele/classical_cheat.hpp"

namespace cvtele {

FockVector<double> reprepare(const CheatStrategy& strategy, cdouble alpha, int N,
                             double leak_tolerance) {
  if (strategy.is_gain()) return coherent_fock<double>(strategy.label(alpha), N, leak_tolerance);
  FockVector<double> f = strategy.custom_rule()(alpha);
  if (f.truncation() != N)
    throw Error(Errc::shape_mismatch, "custom rule returned truncation " +
                                          std::to_string(f.truncation()) + ", expected " +
                                          std::to_string(N));
  return f;
}

Estimate mc_average_fidelity(const GaussianPrior& prior, const CheatStrategy& strategy,
                             std::int64_t n_samples, const SeedStream& seeds,
                             const McOptions& options) {
  if (!(prior.lambda > 0)) throw Error(Errc::lambda_non_positive, "prior needs lambda > 0");
  if (n_samples < 100) throw Error(Errc::invalid_argument, "need at least 100 samples");
  if (!strategy.is_gain()) return mc_average_fidelity_fock(prior, strategy, n_samples, seeds, options);

  return parallel_mean(n_samples, seeds, options.threads, [&](Engine& eng) {
    const cdouble beta = prior_sample(prior, eng);
    const cdouble alpha = heterodyne_sample(beta, eng);
    return std::exp(-std::norm(strategy.label(alpha) - beta));
  });
}

Estimate mc_average_fidelity_fock(const GaussianPrior& prior, const CheatStrategy& strategy,
                                  std::int64_t n_samples, const SeedStream& seeds,
                                  const McOptions& options) {
  if (!(prior.lambda > 0)) throw Error(Errc::lambda_non_positive, "prior needs lambda > 0");
  if (n_samples < 100) throw Error(Errc::invalid_argument, "need at least 100 samples");
  return parallel_mean(n_samples, seeds, options.threads, [&](Engine& eng) {
    const cdouble beta = prior_sample(prior, eng);
    const cdouble alpha = heterodyne_sample(beta, eng);
    const auto input = coherent_fock<double>(beta, options.N, options.leak_tolerance);
    const auto output = reprepare(strategy, alpha, options.N, options.leak_tolerance);
    return std::norm(output.inner(input));
  });
}

double fmax_analytic(double lambda) {
  if (!(lambda >= 0)) throw Error(Errc::lambda_negative, "lambda must be >= 0");
  if (std::isinf(lambda)) return 1.0;
  return (1.0 + lambda) / (2.0 + lambda);
}

Estimate mean_shift_invariance(cdouble prior_mean, double lambda, std::int64_t n_samples,
                               const SeedStream& seeds, bool shifted, const McOptions& options) {
  const GaussianPrior prior(lambda, prior_mean);
  // The heterodyne image of the prior mean is the mean itself (unbiased outcome).
  const auto strategy = shifted ? CheatStrategy::optimal(prior)
                                : CheatStrategy::gain(1.0 / (1.0 + lambda));
  return mc_average_fidelity(prior, strategy, n_samples, seeds, options);
}

OptimalEigenvectorCheck verify_optimal_eigenvector(cdouble alpha, double lambda, int N,
                                                   OperatorMethod method) {
  const auto o = build_O_alpha<double>(alpha, lambda, N, method);
  auto top = top_eigenpair(o);
  const auto target = coherent_fock<double>(alpha / (1.0 + lambda), N);
  OptimalEigenvectorCheck out{
      top.value,
      std::exp(std::norm(alpha) / (1.0 + lambda)) * std::numbers::pi / (2.0 + lambda),
      std::norm(top.vector.inner(target)),
      std::move(top.vector),
  };
  return out;
}

}  // namespace cvtele
