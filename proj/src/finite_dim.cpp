#include "cvtele/finite_dim.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace cvtele {

namespace {

constexpr double kPi = std::numbers::pi;

// Wraps an angle of a real ray (defined mod pi) into (-pi/2, pi/2].
double wrap_ray(double a) {
  a = std::remainder(a, kPi);
  return a <= -kPi / 2 ? a + kPi : a;
}

using CVec = std::vector<std::complex<double>>;

void haar_state(int d, Engine& eng, CVec& out) {
  std::normal_distribution<double> g;
  double norm = 0;
  for (int i = 0; i < d; ++i) {
    const double re = g(eng);
    const double im = g(eng);
    out[static_cast<std::size_t>(i)] = {re, im};
    norm += re * re + im * im;
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (auto& c : out) c *= inv;
}

double overlap_sq(const CVec& a, const CVec& b) {
  std::complex<double> s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::norm(s);
}

template <typename Score>
Estimate haar_mc(const HaarBenchConfig& cfg, int threads, Score&& score) {
  if (cfg.d < 1) throw Error(Errc::dimension_too_small, "Haar benchmark needs d >= 1");
  const SeedStream seeds{cfg.seed, static_cast<std::uint64_t>(cfg.d)};
  return parallel_mean(cfg.n_samples, seeds, threads, [&](Engine& eng) {
    thread_local CVec psi, chi;
    psi.resize(static_cast<std::size_t>(cfg.d));
    chi.resize(static_cast<std::size_t>(cfg.d));
    haar_state(cfg.d, eng, psi);
    haar_state(cfg.d, eng, chi);
    return score(overlap_sq(psi, chi));
  });
}

}  // namespace

TwoStateSet::TwoStateSet(double theta) : theta_(theta) {
  if (!(theta > 0) || theta > kPi / 2)
    throw Error(Errc::theta_out_of_range, "theta must lie in (0, pi/2], got " + std::to_string(theta));
}

double TwoStateSet::x() const { return std::cos(theta_); }

double two_state_optimal_angle(const TwoStateSet& set) {
  const double theta = set.theta();
  const double s = std::sin(theta);
  if (1.0 - s <= 0.0) return 0.0;
  const double bracket = (1.0 + s) / (1.0 - s) + std::cos(2.0 * theta);
  return 0.5 * std::atan(std::sin(2.0 * theta) / bracket);
}

double two_state_cheat_fidelity(const TwoStateSet& set) {
  const double x = set.x();
  const double x2 = x * x;
  return 0.5 * (1.0 + std::sqrt(1.0 - x2 + x2 * x2));
}

TwoStateSearch two_state_brute_force(const TwoStateSet& set, int resolution) {
  if (resolution < 100) throw Error(Errc::invalid_argument, "resolution must be >= 100");
  const double step = kPi / resolution;
  const std::array<double, 2> state_angle{set.theta() / 2, -set.theta() / 2};

  // fid[i][j] = |<chi_j|psi_i>|^2 for the candidate repreparation at angle j*step.
  std::array<std::vector<double>, 2> fid;
  for (int i = 0; i < 2; ++i) {
    fid[i].resize(static_cast<std::size_t>(resolution));
    for (int j = 0; j < resolution; ++j) {
      const double c = std::cos(j * step - state_angle[i]);
      fid[i][static_cast<std::size_t>(j)] = c * c;
    }
  }

  TwoStateSearch best{-1.0, 0.0, 0.0, step};
  std::array<int, 2> best_prep{0, 0};
  std::array<std::array<double, 2>, 2> best_prob{};
  for (int mi = 0; mi < resolution; ++mi) {
    const double m = mi * step;
    double total = 0;
    std::array<int, 2> prep{};
    std::array<std::array<double, 2>, 2> prob{};  // prob[k][i] = p(outcome k | psi_i)
    for (int k = 0; k < 2; ++k) {
      const double e = m + k * kPi / 2;
      for (int i = 0; i < 2; ++i) {
        const double c = std::cos(e - state_angle[i]);
        prob[k][i] = c * c;
      }
      double best_k = -1;
      for (int j = 0; j < resolution; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double v = prob[k][0] * fid[0][ju] + prob[k][1] * fid[1][ju];
        if (v > best_k) {
          best_k = v;
          prep[k] = j;
        }
      }
      total += 0.5 * best_k;
    }
    if (total > best.best_fidelity) {
      best.best_fidelity = total;
      best.best_measurement_angle = std::fmod(m, kPi / 2);
      best_prep = prep;
      best_prob = prob;
    }
  }

  // The outcome more likely under psi_0 is paired with psi_0, the other with psi_1.
  const int k0 = best_prob[0][0] >= best_prob[1][0] ? 0 : 1;
  const int k1 = 1 - k0;
  const double tweak0 = state_angle[0] - wrap_ray(best_prep[k0] * step);
  const double tweak1 = wrap_ray(best_prep[k1] * step) - state_angle[1];
  best.best_tweak = 0.5 * (tweak0 + tweak1);
  return best;
}

Estimate haar_avg_fidelity_mc(const HaarBenchConfig& cfg, int threads) {
  const double d = cfg.d;
  return haar_mc(cfg, threads, [d](double ov) { return d * ov * ov; });
}

Estimate haar_weight_normalization_mc(const HaarBenchConfig& cfg, int threads) {
  const double d = cfg.d;
  return haar_mc(cfg, threads, [d](double ov) { return d * ov; });
}

}  // namespace cvtele
