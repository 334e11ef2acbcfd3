#pragma once

// Experiment orchestration: a flat config describing one command, the
// dispatch that turns it into a table of results, and CSV/JSON emission.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cvtele/error.hpp"

namespace cvtele {

enum class Command {
  bound_sweep,
  cheat_mc,
  operator_check,
  two_state,
  haar,
  teleport_curve,
  verdict,
  gaussian_pair,
};

enum class Format { csv, json };

std::string to_string(Command c);
std::string to_string(Format f);
/// ConfigInvalid on an unknown name.
Command parse_command(std::string_view name);
Format parse_format(std::string_view name);

/// Fields not used by a command keep their defaults. resolve() fills the
/// command-specific defaults and the seed so that every emitted file carries
/// an explicit, replayable config.
struct ExperimentConfig {
  Command command = Command::verdict;

  std::vector<double> lambda;                  // bound-sweep, cheat-mc, operator-check; verdict threshold
  std::optional<double> gain;                  // cheat-mc (default optimal), teleport-curve (default 1)
  std::complex<double> prior_mean{};           // cheat-mc
  std::vector<std::complex<double>> alpha;     // operator-check
  std::vector<double> theta;                   // two-state, explicit angles
  int theta_grid = 0;                          // two-state, k (pi/2)/grid for k = 1..grid
  int resolution = 0;                          // two-state brute force; 0 skips it
  std::vector<int> d;                          // haar
  std::vector<double> r;                       // teleport-curve
  std::complex<double> beta{};                 // teleport-curve input
  double a = 1.0;                              // gaussian-pair
  std::vector<double> b;                       // gaussian-pair
  int points = 0;                              // gaussian-pair grid size
  int N = 60;                                  // Fock truncation
  std::int64_t n_samples = 100'000;            // MC samples; verdict: reported n
  double mean = 0.0;                           // verdict
  double std_error = 0.0;                      // verdict
  double confidence_z = 3.0;                   // verdict
  std::optional<std::uint64_t> seed;
  std::string output_path;                     // empty: stdout
  Format format = Format::csv;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Command defaults plus a fresh random seed if none was given.
ExperimentConfig resolve(ExperimentConfig config);

/// Range checks against the module preconditions; ConfigInvalid naming the field.
void validate(const ExperimentConfig& config);

enum class Verdict { quantum, inconclusive, classical_consistent };
std::string to_string(Verdict v);

struct VerdictRecord {
  double mean_fidelity;
  double std_error;
  std::int64_t n;
  double confidence_z;
  double threshold;       // 1/2, or (1+lambda)/(2+lambda) for a finite prior
  double z_vs_half;       // (mean - 1/2)/std_error
  double z_vs_threshold;  // (mean - threshold)/std_error
  Verdict verdict;
};

/// quantum if mean - z se > threshold; classical-consistent if
/// mean + z se <= threshold; inconclusive otherwise. NonPositiveError if se <= 0.
VerdictRecord verdict(double mean, double std_error, std::int64_t n, double confidence_z = 3.0,
                      std::optional<double> lambda = std::nullopt);

using Cell = std::variant<std::int64_t, double, std::string>;

struct RunRecord {
  ExperimentConfig config;  // resolved
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::map<std::string, double> summary;
};

/// Validates, resolves and dispatches. Monte Carlo work is split over
/// `threads` workers; results do not depend on the worker count.
RunRecord run(const ExperimentConfig& config, int threads = 1);

/// Artifact name and version embedded in every output.
std::string artifact_id();

std::string config_to_json(const ExperimentConfig& config);

/// Accepts a bare config JSON object, a JSON run record, or a CSV run record
/// (reads its "# config:" line). ConfigInvalid on anything else.
ExperimentConfig parse_config(std::string_view text);

std::string to_csv(const RunRecord& record);
std::string to_json(const RunRecord& record);
std::string render(const RunRecord& record);

}  // namespace cvtele
