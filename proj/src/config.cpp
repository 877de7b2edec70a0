#include "blochwp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "toml.hpp"

#include "blochwp/error.hpp"
#include "blochwp/io.hpp"

namespace blochwp {

using nlohmann::json;

namespace {

std::string join(std::string_view path, std::string_view key) {
  return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::ConfigError, what); }

void allow_keys(const json& object, std::string_view path, std::initializer_list<std::string_view> keys) {
  if (!object.is_object()) config_error("'" + std::string(path) + "' must be a table");
  for (const auto& [key, value] : object.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) config_error("unknown key '" + join(path, key) + "'");
  }
}

double number(const json& object, std::string_view path, std::string_view key, double fallback) {
  const auto it = object.find(std::string(key));
  if (it == object.end()) return fallback;
  if (!it->is_number()) config_error("key '" + join(path, key) + "' must be a number");
  return it->get<double>();
}

double required_number(const json& object, std::string_view path, std::string_view key) {
  if (!object.contains(std::string(key))) config_error("missing key '" + join(path, key) + "'");
  return number(object, path, key, 0.0);
}

int integer(const json& object, std::string_view path, std::string_view key, int fallback) {
  const auto it = object.find(std::string(key));
  if (it == object.end()) return fallback;
  if (!it->is_number_integer()) config_error("key '" + join(path, key) + "' must be an integer");
  return it->get<int>();
}

bool boolean(const json& object, std::string_view path, std::string_view key, bool fallback) {
  const auto it = object.find(std::string(key));
  if (it == object.end()) return fallback;
  if (!it->is_boolean()) config_error("key '" + join(path, key) + "' must be a boolean");
  return it->get<bool>();
}

std::vector<double> number_list(const json& value, const std::string& path) {
  if (!value.is_array()) config_error("key '" + path + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) config_error("key '" + path + "' must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::complex<double> complex_value(const json& value, const std::string& path) {
  if (value.is_number()) return value.get<double>();
  if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
    return {value[0].get<double>(), value[1].get<double>()};
  }
  if (value.is_object()) {
    allow_keys(value, path, {"re", "im"});
    return {number(value, path, "re", 0.0), number(value, path, "im", 0.0)};
  }
  config_error("key '" + path + "' must be a number, [re, im] or {re, im}");
}

/// Either an explicit list or a range table.
std::vector<double> sample_list(const json& section, const std::string& path, std::string_view list_key,
                                bool logarithmic) {
  allow_keys(section, path, {list_key, logarithmic ? "log_range" : "range"});
  const std::string range_key = logarithmic ? "log_range" : "range";
  if (section.contains(std::string(list_key)) && section.contains(range_key)) {
    config_error("'" + path + "' takes either '" + std::string(list_key) + "' or '" + range_key + "', not both");
  }
  if (section.contains(std::string(list_key))) return number_list(section.at(std::string(list_key)), join(path, list_key));
  if (!section.contains(range_key)) return {};
  const json& range = section.at(range_key);
  const std::string rpath = join(path, range_key);
  std::vector<double> out;
  if (logarithmic) {
    allow_keys(range, rpath, {"min", "max", "count"});
    const double lo = required_number(range, rpath, "min");
    const double hi = required_number(range, rpath, "max");
    const int count = integer(range, rpath, "count", 50);
    if (!(lo > 0.0 && hi > lo) || count < 2) config_error("'" + rpath + "' needs 0 < min < max and count >= 2");
    for (int i = 0; i < count; ++i) {
      out.push_back(i == count - 1 ? hi : lo * std::pow(hi / lo, double(i) / double(count - 1)));
    }
  } else {
    allow_keys(range, rpath, {"start", "stop", "count"});
    const double start = required_number(range, rpath, "start");
    const double stop = required_number(range, rpath, "stop");
    const int count = integer(range, rpath, "count", 2);
    if (count < 1) config_error("'" + rpath + ".count' must be positive");
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? start : start + (stop - start) * double(i) / double(count - 1));
    }
  }
  return out;
}

FourierPotential parse_potential(const json& section) {
  const std::string path = "potential";
  allow_keys(section, path, {"cosine", "q", "harmonics", "v0"});
  if (section.contains("cosine")) {
    if (section.contains("harmonics") || section.contains("v0") || section.contains("q")) {
      config_error("'potential.cosine' cannot be combined with q, harmonics or v0");
    }
    const json& c = section.at("cosine");
    allow_keys(c, "potential.cosine", {"A", "q"});
    const double amplitude = required_number(c, "potential.cosine", "A");
    const double q = number(c, "potential.cosine", "q", 1.0);
    if (!(amplitude > 0.0)) config_error("key 'potential.cosine.A' must be positive");
    if (!(q > 0.0)) config_error("key 'potential.cosine.q' must be positive");
    return make_cosine(amplitude, q);
  }
  const double q = number(section, path, "q", 1.0);
  if (!(q > 0.0)) config_error("key 'potential.q' must be positive");
  std::vector<Harmonic> harmonics;
  if (section.contains("harmonics")) {
    const json& list = section.at("harmonics");
    if (!list.is_array()) config_error("key 'potential.harmonics' must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string hpath = "potential.harmonics[" + std::to_string(i) + "]";
      allow_keys(list[i], hpath, {"n", "re", "im"});
      const int n = integer(list[i], hpath, "n", 0);
      if (n <= 0) config_error("key '" + hpath + ".n' must be a positive integer");
      harmonics.push_back({n, number(list[i], hpath, "re", 0.0), number(list[i], hpath, "im", 0.0)});
    }
  }
  try {
    return FourierPotential::from_harmonics(q, number(section, path, "v0", 0.0), harmonics);
  } catch (const Error& e) {
    config_error(std::string("potential: ") + e.what());
  }
}

json toml_node_to_json(const toml::node& node) {
  if (const auto* table = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *table) out[std::string(key.str())] = toml_node_to_json(value);
    return out;
  }
  if (const auto* array = node.as_array()) {
    json out = json::array();
    for (const auto& value : *array) out.push_back(toml_node_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  config_error("unsupported TOML value (dates and times are not accepted)");
}

}  // namespace

json toml_to_json(std::string_view text) {
  try {
    const toml::table table = toml::parse(text);
    return toml_node_to_json(table);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
    config_error(msg.str());
  }
}

RunConfig parse_config(std::string_view text, ConfigFormat format) {
  if (format == ConfigFormat::Detect) {
    const auto first = text.find_first_not_of(" \t\r\n");
    format = (first != std::string_view::npos && text[first] == '{') ? ConfigFormat::Json : ConfigFormat::Toml;
  }
  json root;
  if (format == ConfigFormat::Json) {
    try {
      root = json::parse(text);
    } catch (const json::exception& e) {
      config_error(std::string("JSON parse error: ") + e.what());
    }
  } else {
    root = toml_to_json(text);
  }

  RunConfig cfg;
  allow_keys(root, "", {"potential", "units", "grid", "solver", "amplitude", "sweep", "times", "oracle", "output", "workers"});
  cfg.source = root;
  cfg.hash = hex64(fnv1a(root.dump()));

  if (root.contains("units")) {
    const json& u = root.at("units");
    allow_keys(u, "units", {"mu", "hbar"});
    cfg.mu = number(u, "units", "mu", 1.0);
    cfg.hbar = number(u, "units", "hbar", 1.0);
    if (!(cfg.mu > 0.0)) config_error("key 'units.mu' must be positive");
    if (!(cfg.hbar > 0.0)) config_error("key 'units.hbar' must be positive");
  }
  if (root.contains("potential")) cfg.potential = parse_potential(root.at("potential"));

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    allow_keys(g, "grid", {"count", "delta_z"});
    cfg.grid_count = integer(g, "grid", "count", cfg.grid_count);
    cfg.delta_z = number(g, "grid", "delta_z", cfg.delta_z);
    if (cfg.grid_count < 3 || cfg.grid_count % 2 == 0) config_error("key 'grid.count' must be an odd integer >= 3");
    if (!(cfg.delta_z > 0.0 && cfg.delta_z < 0.5)) config_error("key 'grid.delta_z' must lie in (0, 1/2)");
  }
  if (root.contains("solver")) {
    const json& s = root.at("solver");
    allow_keys(s, "solver", {"M", "J_max", "escalate", "max_M", "degeneracy_tolerance"});
    cfg.truncation = integer(s, "solver", "M", cfg.truncation);
    cfg.max_band = integer(s, "solver", "J_max", cfg.max_band);
    cfg.escalate = boolean(s, "solver", "escalate", cfg.escalate);
    cfg.max_truncation = integer(s, "solver", "max_M", cfg.max_truncation);
    cfg.degeneracy_tolerance = number(s, "solver", "degeneracy_tolerance", cfg.degeneracy_tolerance);
    if (cfg.truncation < 0) config_error("key 'solver.M' must be non-negative");
    if (cfg.max_band < 0) config_error("key 'solver.J_max' must be non-negative");
  }
  if (root.contains("amplitude")) {
    const json& a = root.at("amplitude");
    allow_keys(a, "amplitude", {"bands", "csv"});
    if (a.contains("csv")) {
      if (!a.at("csv").is_string()) config_error("key 'amplitude.csv' must be a path string");
      cfg.amplitude_csv = a.at("csv").get<std::string>();
    }
    if (a.contains("bands")) {
      const json& list = a.at("bands");
      if (!list.is_array()) config_error("key 'amplitude.bands' must be an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "amplitude.bands[" + std::to_string(i) + "]";
        allow_keys(list[i], path, {"j", "kind", "z0", "w", "weight", "phase"});
        AmplitudeEntry entry;
        entry.band = integer(list[i], path, "j", 0);
        if (entry.band < 0) config_error("key '" + path + ".j' must be non-negative");
        if (list[i].contains("kind")) {
          if (!list[i].at("kind").is_string() || list[i].at("kind").get<std::string>() != "bump") {
            config_error("key '" + path + ".kind' must be \"bump\"");
          }
        }
        entry.center = required_number(list[i], path, "z0");
        entry.halfwidth = required_number(list[i], path, "w");
        if (list[i].contains("weight")) entry.weight = complex_value(list[i].at("weight"), path + ".weight");
        entry.phase = number(list[i], path, "phase", 0.0);
        cfg.amplitude.push_back(entry);
      }
    }
  }
  if (root.contains("sweep")) cfg.alphas = sample_list(root.at("sweep"), "sweep", "alphas", true);
  for (double a : cfg.alphas) {
    if (!(a > 0.0)) config_error("sweep values of alpha must be positive");
  }
  if (root.contains("times")) cfg.times = sample_list(root.at("times"), "times", "values", false);
  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    allow_keys(o, "oracle", {"times", "max_norm_deficit"});
    if (o.contains("times")) cfg.oracle_times = number_list(o.at("times"), "oracle.times");
    cfg.oracle_max_norm_deficit = number(o, "oracle", "max_norm_deficit", cfg.oracle_max_norm_deficit);
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    allow_keys(o, "output", {"dir"});
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) config_error("key 'output.dir' must be a string");
      cfg.out_dir = o.at("dir").get<std::string>();
    }
  }
  cfg.workers = integer(root, "", "workers", cfg.workers);
  if (cfg.workers < 1) config_error("key 'workers' must be at least 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  ConfigFormat format = ConfigFormat::Detect;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (path.ends_with(".json")) format = ConfigFormat::Json;
    if (path.ends_with(".toml")) format = ConfigFormat::Toml;
  }
  return parse_config(text, format);
}

FourierPotential RunConfig::dimensionless_potential() const {
  require(potential.has_value(), ErrorCode::ConfigError, "missing table 'potential'");
  return to_dimensionless(*potential, mu, hbar);
}

QuasiMomentumAmplitude RunConfig::build_amplitude(const BrillouinGrid& grid) const {
  std::optional<QuasiMomentumAmplitude> total;
  auto add = [&](QuasiMomentumAmplitude part) {
    total = total ? *total + part : std::move(part);
  };
  for (const auto& entry : amplitude) {
    add(make_bump(grid, entry.band, entry.center, entry.halfwidth).scaled(entry.weight * std::polar(1.0, entry.phase)));
  }
  if (amplitude_csv) {
    std::ifstream in(*amplitude_csv);
    if (!in) config_error("cannot open amplitude CSV '" + *amplitude_csv + "'");
    add(read_amplitude_csv(in, grid));
  }
  require(total.has_value(), ErrorCode::ConfigError, "missing table 'amplitude'");
  return total->normalized();
}

int RunConfig::required_max_band() const {
  int j = max_band;
  for (const auto& entry : amplitude) j = std::max(j, entry.band);
  return j;
}

}  // namespace blochwp
