#pragma once

// Finite-dimensional cheating benchmarks: two equiprobable real qubit states
// with inner product cos(theta), and Haar-uniform pure states in dimension d.

#include <cstdint>

#include "cvtele/error.hpp"
#include "cvtele/monte_carlo.hpp"

namespace cvtele {

/// Two states at angles +theta/2 and -theta/2 in the real plane, so their
/// inner product is x = cos(theta). theta in (0, pi/2].
class TwoStateSet {
 public:
  explicit TwoStateSet(double theta);

  double theta() const { return theta_; }
  double x() const;

 private:
  double theta_;
};

/// Angle by which Bob tilts each resynthesized state toward the other one.
/// Defined as 0 at theta = pi/2 by continuity.
double two_state_optimal_angle(const TwoStateSet& set);

/// 1/2 (1 + sqrt(1 - x^2 + x^4)).
double two_state_cheat_fidelity(const TwoStateSet& set);

struct TwoStateSearch {
  double best_fidelity;
  double best_measurement_angle;  // first basis vector's angle, reduced to [0, pi/2)
  double best_tweak;              // tilt of Bob's state away from the nearer input, toward the other
  double grid_step;
};

/// Exhaustive search over Alice's projective measurement angle and Bob's two
/// repreparation angles, each on a uniform grid of `resolution` points over
/// [0, pi). For a fixed measurement, the two repreparation choices decouple,
/// so each is maximised independently.
TwoStateSearch two_state_brute_force(const TwoStateSet& set, int resolution);

struct HaarBenchConfig {
  int d = 2;
  std::int64_t n_samples = 1'000'000;
  std::uint64_t seed = 0;
};

/// Measure-and-reprepare fidelity of the covariant pure-state POVM
/// {d |chi><chi| dchi}: importance-weighted average of d |<psi|chi>|^4 over
/// independent Haar psi, chi. Converges to 2/(d+1).
Estimate haar_avg_fidelity_mc(const HaarBenchConfig& cfg, int threads = 1);

/// E[d |<psi|chi>|^2]; equals 1 when the outcome weights are normalised.
Estimate haar_weight_normalization_mc(const HaarBenchConfig& cfg, int threads = 1);

}  // namespace cvtele
