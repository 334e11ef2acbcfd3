#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cvtele/runner.hpp"
#include "cvtele/version.hpp"

using namespace cvtele;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

// Accepts "1e6" as well as "1000000".
std::int64_t parse_count(const std::string& field, const std::string& text) {
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !(v >= 0) || v > 9e18 ||
      std::floor(v) != v)
    throw Error(Errc::config_invalid, field + ": expected a nonnegative integer, got '" + text + "'");
  return static_cast<std::int64_t>(v);
}

// "re" or "re:im".
std::complex<double> parse_complex(const std::string& field, const std::string& text) {
  const auto colon = text.find(':');
  auto number = [&](std::string_view s) {
    double v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
      throw Error(Errc::config_invalid, field + ": cannot parse '" + text + "' as re or re:im");
    return v;
  };
  if (colon == std::string::npos) return {number(text), 0.0};
  return {number(std::string_view(text).substr(0, colon)),
          number(std::string_view(text).substr(colon + 1))};
}

struct Shared {
  std::string n_text;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
  std::string output;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int N = 60;
};

void add_shared(CLI::App* sub, Shared& s, bool with_samples) {
  if (with_samples) sub->add_option("--n", s.n_text, "Monte Carlo sample count (1e6 accepted)");
  sub->add_option("--seed", s.seed, "RNG seed; drawn at random and recorded if omitted");
  sub->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("-o,--output", s.output, "Output file (default: stdout)");
  sub->add_option("--threads", s.threads, "Worker threads; results do not depend on it")
      ->check(CLI::PositiveNumber);
  sub->add_option("--N", s.N, "Fock truncation");
}

void emit(const RunRecord& rec) {
  const std::string text = render(rec);
  if (rec.config.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(rec.config.output_path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + rec.config.output_path);
  for (const auto& [k, v] : rec.summary) std::cerr << k << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical-bound and teleportation-fidelity experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Shared shared;
  ExperimentConfig cfg;
  std::vector<std::string> alpha_text;
  std::string prior_mean_text = "0", beta_text = "0";
  double gain = std::numeric_limits<double>::quiet_NaN();
  std::string rerun_path;

  auto* bound = app.add_subcommand("bound-sweep", "MC fidelity of the optimal gain rule against (1+l)/(2+l)");
  bound->add_option("--lambda", cfg.lambda, "Prior widths, comma separated")->delimiter(',');
  add_shared(bound, shared, true);

  auto* cheat = app.add_subcommand("cheat-mc", "MC fidelity of a gain rule, optionally with a shifted prior");
  cheat->add_option("--lambda", cfg.lambda)->delimiter(',');
  cheat->add_option("--gain", gain, "Gain g (default 1/(1+lambda))");
  cheat->add_option("--prior-mean", prior_mean_text, "Prior centre, re or re:im");
  add_shared(cheat, shared, true);

  auto* op = app.add_subcommand("operator-check", "O_alpha closed form vs quadrature, top eigenpair");
  op->add_option("--alpha", alpha_text, "Labels, re or re:im, comma separated")->delimiter(',');
  op->add_option("--lambda", cfg.lambda)->delimiter(',');
  add_shared(op, shared, false);

  auto* two = app.add_subcommand("two-state", "Two-state measure-and-reprepare benchmark");
  two->add_option("--theta", cfg.theta, "Explicit angles in (0, pi/2]")->delimiter(',');
  two->add_option("--theta-grid", cfg.theta_grid, "Uniform grid size over (0, pi/2]");
  two->add_option("--resolution", cfg.resolution, "Brute-force grid resolution (0 skips)");
  add_shared(two, shared, false);

  auto* haar = app.add_subcommand("haar", "Haar-average measure-and-reprepare fidelity");
  haar->add_option("--d", cfg.d, "Dimensions, comma separated")->delimiter(',');
  add_shared(haar, shared, true);

  auto* tele = app.add_subcommand("teleport-curve", "Teleportation fidelity versus squeezing r");
  tele->add_option("--r", cfg.r, "Squeezing values, comma separated")->delimiter(',');
  tele->add_option("--gain", gain, "Classical-channel gain (default 1)");
  tele->add_option("--beta", beta_text, "Input coherent label, re or re:im");
  add_shared(tele, shared, false);

  auto* ver = app.add_subcommand("verdict", "Compare a measured fidelity with the classical bound");
  ver->add_option("--mean", cfg.mean)->required();
  ver->add_option("--std-error", cfg.std_error)->required();
  ver->add_option("--z", cfg.confidence_z, "Confidence multiplier");
  ver->add_option("--lambda", cfg.lambda, "Finite-prior threshold (1+l)/(2+l)")->expected(1);
  add_shared(ver, shared, true);

  auto* pair = app.add_subcommand("gaussian-pair", "Quadrature densities and overlap of psi_+ / psi_-");
  pair->add_option("--a", cfg.a);
  pair->add_option("--b", cfg.b)->delimiter(',');
  pair->add_option("--points", cfg.points, "Grid points over +-8 sigma");
  add_shared(pair, shared, false);

  auto* rerun = app.add_subcommand("rerun", "Repeat the run recorded in a CSV/JSON output file");
  rerun->add_option("file", rerun_path)->required()->check(CLI::ExistingFile);
  rerun->add_option("-o,--output", shared.output, "Output file (default: stdout)");
  rerun->add_option("--threads", shared.threads)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (rerun->parsed()) {
      std::ifstream in(rerun_path, std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = parse_config(buf.str());
      cfg.output_path = shared.output;
    } else {
      CLI::App* sub = app.get_subcommands().front();
      cfg.command = parse_command(sub->get_name());
      if (!shared.n_text.empty()) cfg.n_samples = parse_count("n", shared.n_text);
      cfg.seed = shared.seed;
      cfg.format = parse_format(shared.format);
      cfg.output_path = shared.output;
      cfg.N = shared.N;
      if (!std::isnan(gain)) cfg.gain = gain;
      cfg.prior_mean = parse_complex("prior_mean", prior_mean_text);
      cfg.beta = parse_complex("beta", beta_text);
      for (const auto& a : alpha_text) cfg.alpha.push_back(parse_complex("alpha", a));
    }
    emit(run(cfg, shared.threads));
  } catch (const Error& e) {
    std::cerr << "cvtele: " << e.what() << '\n';
    return e.code() == Errc::config_invalid ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "cvtele: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
