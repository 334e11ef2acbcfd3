#include "cvtele/runner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cvtele/classical_cheat.hpp"
#include "cvtele/fidelity_measures.hpp"
#include "cvtele/finite_dim.hpp"
#include "cvtele/gaussian_channel.hpp"
#include "cvtele/monte_carlo.hpp"

namespace cvtele {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::bound_sweep, "bound-sweep"},   {Command::cheat_mc, "cheat-mc"},
    {Command::operator_check, "operator-check"}, {Command::two_state, "two-state"},
    {Command::haar, "haar"},                 {Command::teleport_curve, "teleport-curve"},
    {Command::verdict, "verdict"},           {Command::gaussian_pair, "gaussian-pair"},
};

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(Errc::config_invalid, field + ": " + message);
}

void require_lambda(const ExperimentConfig& c, bool allow_empty) {
  if (!allow_empty && c.lambda.empty()) invalid("lambda", "at least one value required");
  for (double l : c.lambda)
    if (!(l > 0) || !std::isfinite(l)) invalid("lambda", "values must be finite and > 0");
}

void require_samples(const ExperimentConfig& c) {
  if (c.n_samples < 100) invalid("n_samples", "Monte Carlo needs at least 100 samples");
}

SeedStream row_seeds(const ExperimentConfig& c, std::size_t row) {
  return SeedStream{*c.seed, 0}.substream(row);
}

RunRecord bound_sweep(const ExperimentConfig& c, int threads) {
  RunRecord rec;
  rec.columns = {"lambda", "n", "mean", "std_error", "fmax_analytic", "z"};
  double worst = 0;
  for (std::size_t k = 0; k < c.lambda.size(); ++k) {
    const GaussianPrior prior(c.lambda[k]);
    const auto e = mc_average_fidelity(prior, CheatStrategy::optimal(prior), c.n_samples,
                                       row_seeds(c, k), {threads, c.N});
    const double f = fmax_analytic(c.lambda[k]);
    const double z = (e.mean - f) / e.std_error;
    worst = std::max(worst, std::abs(z));
    rec.rows.push_back({c.lambda[k], e.n, e.mean, e.std_error, f, z});
  }
  rec.summary["max_abs_z"] = worst;
  return rec;
}

RunRecord cheat_mc(const ExperimentConfig& c, int threads) {
  RunRecord rec;
  rec.columns = {"lambda", "gain", "prior_mean_re", "prior_mean_im", "n", "mean", "std_error", "fmax_analytic"};
  for (std::size_t k = 0; k < c.lambda.size(); ++k) {
    const GaussianPrior prior(c.lambda[k], c.prior_mean);
    const double g = c.gain ? *c.gain : 1.0 / (1.0 + c.lambda[k]);
    const auto e = mc_average_fidelity(prior, CheatStrategy::gain(g, c.prior_mean), c.n_samples,
                                       row_seeds(c, k), {threads, c.N});
    rec.rows.push_back({c.lambda[k], g, c.prior_mean.real(), c.prior_mean.imag(), e.n, e.mean,
                        e.std_error, fmax_analytic(c.lambda[k])});
  }
  return rec;
}

RunRecord operator_check(const ExperimentConfig& c) {
  RunRecord rec;
  rec.columns = {"alpha_re", "alpha_im", "lambda", "N", "mu1", "mu1_expected",
                 "mu1_rel_error", "match_fidelity", "max_entry_diff"};
  double worst_diff = 0, worst_rel = 0, worst_match = 1;
  for (cd alpha : c.alpha) {
    for (double lambda : c.lambda) {
      const auto closed = build_O_alpha<double>(alpha, lambda, c.N, OperatorMethod::closed_form);
      const auto quad = build_O_alpha<double>(alpha, lambda, c.N, OperatorMethod::quadrature);
      const double diff = (closed.matrix() - quad.matrix()).cwiseAbs().maxCoeff();
      const auto check = verify_optimal_eigenvector(alpha, lambda, c.N);
      const double rel = std::abs(check.mu1 - check.mu1_expected) / check.mu1_expected;
      worst_diff = std::max(worst_diff, diff);
      worst_rel = std::max(worst_rel, rel);
      worst_match = std::min(worst_match, check.match_fidelity);
      rec.rows.push_back({alpha.real(), alpha.imag(), lambda, std::int64_t{c.N}, check.mu1,
                          check.mu1_expected, rel, check.match_fidelity, diff});
    }
  }
  rec.summary["max_entry_diff"] = worst_diff;
  rec.summary["max_mu1_rel_error"] = worst_rel;
  rec.summary["min_match_fidelity"] = worst_match;
  return rec;
}

std::vector<double> two_state_angles(const ExperimentConfig& c) {
  if (!c.theta.empty()) return c.theta;
  std::vector<double> t;
  for (int k = 1; k <= c.theta_grid; ++k) t.push_back(k * (kPi / 2) / c.theta_grid);
  return t;
}

RunRecord two_state(const ExperimentConfig& c) {
  RunRecord rec;
  rec.columns = {"theta", "x", "phi_analytic", "fidelity_analytic"};
  if (c.resolution > 0)
    rec.columns.insert(rec.columns.end(), {"fidelity_brute", "phi_brute", "grid_step"});
  double lowest = 2, at_x = 0;
  for (double theta : two_state_angles(c)) {
    const TwoStateSet set(theta);
    const double f = two_state_cheat_fidelity(set);
    std::vector<Cell> row{theta, set.x(), two_state_optimal_angle(set), f};
    if (c.resolution > 0) {
      const auto s = two_state_brute_force(set, c.resolution);
      row.insert(row.end(), {s.best_fidelity, s.best_tweak, s.grid_step});
    }
    if (f < lowest) {
      lowest = f;
      at_x = set.x();
    }
    rec.rows.push_back(std::move(row));
  }
  rec.summary["min_fidelity_analytic"] = lowest;
  rec.summary["argmin_x"] = at_x;
  return rec;
}

RunRecord haar(const ExperimentConfig& c, int threads) {
  RunRecord rec;
  rec.columns = {"d", "n", "mean", "std_error", "expected"};
  for (int d : c.d) {
    const auto e = haar_avg_fidelity_mc({d, c.n_samples, *c.seed}, threads);
    rec.rows.push_back({std::int64_t{d}, e.n, e.mean, e.std_error, 2.0 / (d + 1)});
  }
  return rec;
}

RunRecord teleport_curve(const ExperimentConfig& c) {
  RunRecord rec;
  rec.columns = {"r", "gain", "fidelity_gaussian", "fidelity_fock", "classical_bound"};
  const double g = c.gain.value_or(1.0);
  const auto f = fidelity_vs_r_curve<double>(c.r, g, c.beta);
  for (std::size_t k = 0; k < c.r.size(); ++k) {
    // The Fock evaluation models the unit-gain output only.
    const double fock = g == 1.0 ? fock_cross_check(c.beta, c.r[k], c.N)
                                 : std::numeric_limits<double>::quiet_NaN();
    rec.rows.push_back({c.r[k], g, f[k], fock, 0.5});
  }
  // Linear interpolation of the first upward crossing of 0.58 on the grid.
  for (std::size_t k = 1; k < c.r.size(); ++k) {
    if (f[k - 1] < 0.58 && f[k] >= 0.58) {
      rec.summary["r_at_0.58"] = c.r[k - 1] + (0.58 - f[k - 1]) * (c.r[k] - c.r[k - 1]) / (f[k] - f[k - 1]);
      break;
    }
  }
  return rec;
}

RunRecord verdict_command(const ExperimentConfig& c) {
  const std::optional<double> lambda =
      c.lambda.empty() ? std::nullopt : std::optional<double>(c.lambda.front());
  const auto v = verdict(c.mean, c.std_error, c.n_samples, c.confidence_z, lambda);
  RunRecord rec;
  rec.columns = {"mean", "std_error", "n", "confidence_z", "threshold", "z_vs_half",
                 "z_vs_threshold", "verdict"};
  rec.rows.push_back({v.mean_fidelity, v.std_error, v.n, v.confidence_z, v.threshold, v.z_vs_half,
                      v.z_vs_threshold, to_string(v.verdict)});
  return rec;
}

RunRecord gaussian_pair(const ExperimentConfig& c) {
  RunRecord rec;
  rec.columns = {"a", "b", "overlap_re", "overlap_im", "quadrature_re", "quadrature_im",
                 "overlap_abs_error", "max_x_density_diff", "max_k_density_diff"};
  for (double b : c.b) {
    const GaussianPairParams p(c.a, b);
    const auto grid = gaussian_pair_grid(p, c.points);
    const auto dens = gaussian_pair_densities(p, grid);
    const cd exact = gaussian_pair_overlap(p);
    double dx = 0, dk = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      dx = std::max(dx, std::abs(dens.x_plus[i] - dens.x_minus[i]));
      dk = std::max(dk, std::abs(dens.k_plus[i] - dens.k_minus[i]));
    }
    rec.rows.push_back({c.a, b, exact.real(), exact.imag(), dens.quadrature_overlap.real(),
                        dens.quadrature_overlap.imag(), std::abs(dens.quadrature_overlap - exact), dx, dk});
  }
  return rec;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& e : kCommands)
    if (e.command == c) return e.name;
  return "unknown";
}

std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

Command parse_command(std::string_view name) {
  for (const auto& e : kCommands)
    if (name == e.name) return e.command;
  invalid("command", "unknown command '" + std::string(name) + "'");
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  invalid("format", "expected csv or json, got '" + std::string(name) + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::quantum: return "quantum";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::classical_consistent: return "classical-consistent";
  }
  return "unknown";
}

ExperimentConfig resolve(ExperimentConfig c) {
  switch (c.command) {
    case Command::bound_sweep:
      if (c.lambda.empty()) c.lambda = {0.01, 0.1, 1.0};
      break;
    case Command::cheat_mc:
      if (c.lambda.empty()) c.lambda = {1.0};
      break;
    case Command::operator_check:
      if (c.alpha.empty()) c.alpha = {cd(0.5, 0), cd(1.5, 1.0), cd(0, 3.0)};
      if (c.lambda.empty()) c.lambda = {0.5, 1.0, 2.0};
      break;
    case Command::two_state:
      if (c.theta.empty() && c.theta_grid == 0) c.theta_grid = 100;
      break;
    case Command::haar:
      if (c.d.empty()) c.d = {2, 3, 4, 5};
      break;
    case Command::teleport_curve:
      if (c.r.empty())
        for (int k = 0; k <= 20; ++k) c.r.push_back(k * 0.05);
      if (!c.gain) c.gain = 1.0;
      break;
    case Command::verdict:
      break;
    case Command::gaussian_pair:
      if (c.b.empty()) c.b = {0.0, 1.0, 5.0, 100.0};
      if (c.points == 0) c.points = 40001;
      break;
  }
  if (!c.seed) {
    std::random_device rd;
    c.seed = (std::uint64_t{rd()} << 32) | rd();
  }
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.N < 1) invalid("N", "truncation must be >= 1");
  switch (c.command) {
    case Command::bound_sweep:
      require_lambda(c, false);
      require_samples(c);
      break;
    case Command::cheat_mc:
      require_lambda(c, false);
      require_samples(c);
      if (c.gain && !(*c.gain >= 0)) invalid("gain", "must be >= 0");
      break;
    case Command::operator_check:
      require_lambda(c, false);
      if (c.alpha.empty()) invalid("alpha", "at least one value required");
      break;
    case Command::two_state:
      if (c.theta.empty() && c.theta_grid < 1) invalid("theta_grid", "must be >= 1");
      for (double t : c.theta)
        if (!(t > 0 && t <= kPi / 2)) invalid("theta", "angles must lie in (0, pi/2]");
      if (c.resolution != 0 && c.resolution < 100) invalid("resolution", "must be 0 or >= 100");
      break;
    case Command::haar:
      require_samples(c);
      if (c.d.empty()) invalid("d", "at least one dimension required");
      for (int d : c.d)
        if (d < 1) invalid("d", "dimensions must be >= 1");
      break;
    case Command::teleport_curve:
      if (c.r.empty()) invalid("r", "at least one value required");
      for (double r : c.r)
        if (!(r >= 0) || !std::isfinite(r)) invalid("r", "values must be finite and >= 0");
      if (c.gain && !(*c.gain >= 0)) invalid("gain", "must be >= 0");
      break;
    case Command::verdict:
      require_lambda(c, true);
      if (c.lambda.size() > 1) invalid("lambda", "verdict takes a single threshold lambda");
      if (!(c.std_error > 0)) invalid("std_error", "must be > 0");
      if (!std::isfinite(c.mean)) invalid("mean", "must be finite");
      if (!(c.confidence_z > 0)) invalid("confidence_z", "must be > 0");
      if (c.n_samples < 1) invalid("n_samples", "must be >= 1");
      break;
    case Command::gaussian_pair:
      if (!(c.a > 0)) invalid("a", "must be > 0");
      if (c.b.empty()) invalid("b", "at least one value required");
      for (double b : c.b)
        if (!(b >= 0)) invalid("b", "values must be >= 0");
      if (c.points < 2) invalid("points", "must be >= 2");
      break;
  }
}

VerdictRecord verdict(double mean, double std_error, std::int64_t n, double confidence_z,
                      std::optional<double> lambda) {
  if (!(std_error > 0)) throw Error(Errc::non_positive_error, "std_error must be > 0");
  const double threshold = lambda ? fmax_analytic(*lambda) : 0.5;
  Verdict v = Verdict::inconclusive;
  if (mean - confidence_z * std_error > threshold)
    v = Verdict::quantum;
  else if (mean + confidence_z * std_error <= threshold)
    v = Verdict::classical_consistent;
  return {mean, std_error, n, confidence_z, threshold, (mean - 0.5) / std_error,
          (mean - threshold) / std_error, v};
}

RunRecord run(const ExperimentConfig& config, int threads) {
  const ExperimentConfig c = resolve(config);
  validate(c);
  threads = std::max(threads, 1);
  RunRecord rec;
  switch (c.command) {
    case Command::bound_sweep: rec = bound_sweep(c, threads); break;
    case Command::cheat_mc: rec = cheat_mc(c, threads); break;
    case Command::operator_check: rec = operator_check(c); break;
    case Command::two_state: rec = two_state(c); break;
    case Command::haar: rec = haar(c, threads); break;
    case Command::teleport_curve: rec = teleport_curve(c); break;
    case Command::verdict: rec = verdict_command(c); break;
    case Command::gaussian_pair: rec = gaussian_pair(c); break;
  }
  rec.config = c;
  return rec;
}

}  // namespace cvtele
