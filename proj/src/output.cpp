#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cvtele/runner.hpp"
#include "cvtele/version.hpp"

namespace cvtele {

namespace {

using nlohmann::json;
using cd = std::complex<double>;

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::config_invalid, "complex values are [re, im] pairs");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json config_object(const ExperimentConfig& c) {
  json alpha = json::array();
  for (cd a : c.alpha) alpha.push_back(complex_json(a));
  return json{
      {"command", to_string(c.command)},
      {"lambda", c.lambda},
      {"gain", c.gain ? json(*c.gain) : json(nullptr)},
      {"prior_mean", complex_json(c.prior_mean)},
      {"alpha", alpha},
      {"theta", c.theta},
      {"theta_grid", c.theta_grid},
      {"resolution", c.resolution},
      {"d", c.d},
      {"r", c.r},
      {"beta", complex_json(c.beta)},
      {"a", c.a},
      {"b", c.b},
      {"points", c.points},
      {"N", c.N},
      {"n_samples", c.n_samples},
      {"mean", c.mean},
      {"std_error", c.std_error},
      {"confidence_z", c.confidence_z},
      {"seed", c.seed ? json(*c.seed) : json(nullptr)},
      {"output_path", c.output_path},
      {"format", to_string(c.format)},
  };
}

ExperimentConfig config_from(const json& j) {
  if (!j.is_object()) throw Error(Errc::config_invalid, "config must be a JSON object");
  static const std::set<std::string> known{
      "command", "lambda", "gain", "prior_mean", "alpha", "theta", "theta_grid", "resolution",
      "d", "r", "beta", "a", "b", "points", "N", "n_samples", "mean", "std_error",
      "confidence_z", "seed", "output_path", "format"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw Error(Errc::config_invalid, item.key() + ": unknown field");
  if (!j.contains("command")) throw Error(Errc::config_invalid, "command: missing");

  ExperimentConfig c;
  std::string field;
  try {
    auto get = [&](const char* key, auto& dst) {
      field = key;
      if (j.contains(key)) j.at(key).get_to(dst);
    };
    field = "command";
    c.command = parse_command(j.at("command").get<std::string>());
    get("lambda", c.lambda);
    field = "gain";
    if (j.contains("gain") && !j.at("gain").is_null()) c.gain = j.at("gain").get<double>();
    field = "prior_mean";
    if (j.contains("prior_mean")) c.prior_mean = complex_from(j.at("prior_mean"));
    field = "alpha";
    if (j.contains("alpha"))
      for (const auto& a : j.at("alpha")) c.alpha.push_back(complex_from(a));
    get("theta", c.theta);
    get("theta_grid", c.theta_grid);
    get("resolution", c.resolution);
    get("d", c.d);
    get("r", c.r);
    field = "beta";
    if (j.contains("beta")) c.beta = complex_from(j.at("beta"));
    get("a", c.a);
    get("b", c.b);
    get("points", c.points);
    get("N", c.N);
    get("n_samples", c.n_samples);
    get("mean", c.mean);
    get("std_error", c.std_error);
    get("confidence_z", c.confidence_z);
    field = "seed";
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    get("output_path", c.output_path);
    field = "format";
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(Errc::config_invalid, field + ": " + e.what());
  }
  return c;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  return std::get<std::string>(cell);
}

json cell_json(const Cell& cell) {
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* d = std::get_if<double>(&cell)) return std::isfinite(*d) ? json(*d) : json(nullptr);
  return std::get<std::string>(cell);
}

}  // namespace

std::string artifact_id() { return std::string("cvtele ") + kVersion; }

std::string config_to_json(const ExperimentConfig& config) { return config_object(config).dump(); }

ExperimentConfig parse_config(std::string_view text) {
  std::size_t start = text.find_first_not_of(" \t\r\n");
  if (start == std::string_view::npos) throw Error(Errc::config_invalid, "empty input");
  if (text[start] == '#') {
    std::istringstream in{std::string(text)};
    std::string line;
    const std::string tag = "# config: ";
    while (std::getline(in, line)) {
      if (line.rfind(tag, 0) == 0) {
        try {
          return config_from(json::parse(line.substr(tag.size())));
        } catch (const json::parse_error& e) {
          throw Error(Errc::config_invalid, std::string("config line: ") + e.what());
        }
      }
      if (line.empty() || line[0] != '#') break;
    }
    throw Error(Errc::config_invalid, "CSV record has no config line");
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_invalid, e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("artifact")) return config_from(j.at("config"));
  return config_from(j);
}

std::string to_csv(const RunRecord& rec) {
  std::ostringstream out;
  out << "# " << artifact_id() << '\n';
  out << "# config: " << config_to_json(rec.config) << '\n';
  if (!rec.summary.empty()) {
    json s = json::object();
    for (const auto& [k, v] : rec.summary) s[k] = format_double(v);
    out << "# summary: " << s.dump() << '\n';
  }
  for (std::size_t k = 0; k < rec.columns.size(); ++k) out << (k ? "," : "") << rec.columns[k];
  out << '\n';
  for (const auto& row : rec.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_cell(row[k]);
    out << '\n';
  }
  return out.str();
}

std::string to_json(const RunRecord& rec) {
  json rows = json::array();
  for (const auto& row : rec.rows) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(cell_json(cell));
    rows.push_back(std::move(r));
  }
  json summary = json::object();
  for (const auto& [k, v] : rec.summary) summary[k] = std::isfinite(v) ? json(v) : json(nullptr);
  json j{
      {"artifact", "cvtele"},
      {"version", kVersion},
      {"config", config_object(rec.config)},
      {"columns", rec.columns},
      {"rows", rows},
      {"summary", summary},
  };
  return j.dump(2) + "\n";
}

std::string render(const RunRecord& record) {
  return record.config.format == Format::json ? to_json(record) : to_csv(record);
}

}  // namespace cvtele
