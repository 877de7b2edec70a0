#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "blochwp/bands.hpp"
#include "blochwp/potential.hpp"
#include "blochwp/wavepacket.hpp"

namespace blochwp {

enum class ConfigFormat { Toml, Json, Detect };

struct AmplitudeEntry {
  int band = 0;
  std::string kind = "bump";
  double center = 0.0;
  double halfwidth = 0.1;
  std::complex<double> weight = 1.0;
  double phase = 0.0;
};

/// Validated run configuration. Every key is checked against the schema
/// before any computation; unknown keys are config errors naming the key.
struct RunConfig {
  nlohmann::json source;
  std::string hash;

  double mu = 1.0;
  double hbar = 1.0;
  /// Potential as written, in physical units (absent when only a sweep is given).
  std::optional<FourierPotential> potential;

  int grid_count = BrillouinGrid::kDefaultCount;
  double delta_z = BrillouinGrid::kDefaultMargin;

  int truncation = 100;
  int max_band = 0;
  bool escalate = true;
  int max_truncation = 1600;
  double degeneracy_tolerance = 1e-9;

  std::vector<AmplitudeEntry> amplitude;
  std::optional<std::string> amplitude_csv;

  std::vector<double> alphas;
  std::vector<double> times;
  std::vector<double> oracle_times;
  double oracle_max_norm_deficit = 1e-6;

  std::string out_dir = ".";
  int workers = 1;

  BrillouinGrid grid() const { return BrillouinGrid(grid_count, delta_z); }
  /// Potential in the internal units (q = 1, energies in hbar^2 q^2 / 2 mu).
  FourierPotential dimensionless_potential() const;
  /// Amplitude on `grid`: entries superposed, then normalized.
  QuasiMomentumAmplitude build_amplitude(const BrillouinGrid& grid) const;
  /// Largest band any amplitude entry occupies (or max_band when larger).
  int required_max_band() const;
};

RunConfig parse_config(std::string_view text, ConfigFormat format = ConfigFormat::Detect);

/// Reads `path` ("-" for stdin); the format follows the extension (.json or
/// .toml) and is otherwise detected from the content.
RunConfig load_config(const std::string& path);

/// TOML document as a JSON value (tables become objects).
nlohmann::json toml_to_json(std::string_view text);

}  // namespace blochwp
