#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>

#include "blochwp/bands.hpp"
#include "blochwp/config.hpp"
#include "blochwp/error.hpp"
#include "blochwp/io.hpp"
#include "blochwp/oracle.hpp"
#include "blochwp/parallel.hpp"
#include "blochwp/positivity.hpp"

namespace blochwp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  RunConfig config;
  std::string command;
  fs::path out_dir;
  std::optional<std::string> bands_out;
  bool self_check = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
      return kConfigError;
    case ErrorCode::ZoneBoundaryExcluded:
    case ErrorCode::TruncationTooSmall:
    case ErrorCode::SupportViolation:
    case ErrorCode::FoldingSeam:
    case ErrorCode::WrongOperation:
    case ErrorCode::NyquistViolation:
      return kPrecondition;
    case ErrorCode::NumericalFailure:
    case ErrorCode::DegenerateBands:
    case ErrorCode::BandOverlap:
    case ErrorCode::WindowDeficit:
      return kNumericalFailure;
    case ErrorCode::InvariantViolation:
      return kInvariantViolation;
  }
  return kNumericalFailure;
}

json metadata(const Context& ctx, json extra = json::object()) {
  json header = {
      {"tool", kToolName},
      {"version", kToolVersion},
      {"command", ctx.command},
      {"config_hash", ctx.config.hash},
      {"conventions", conventions_json()},
  };
  for (auto& [key, value] : extra.items()) header[key] = std::move(value);
  return header;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  require(static_cast<bool>(file), ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
  return file;
}

BandOptions band_options(const RunConfig& cfg, int workers) {
  BandOptions options;
  options.solver.degeneracy_tolerance = cfg.degeneracy_tolerance;
  options.workers = workers;
  return options;
}

/// Table at the configured truncation, escalated until M and 2M agree when requested.
ConvergedBands build_table(const RunConfig& cfg, const FourierPotential& potential, int max_band, int workers) {
  const BandOptions options = band_options(cfg, workers);
  if (cfg.escalate) {
    return compute_bands_converged(potential, cfg.grid(), max_band, cfg.truncation, cfg.max_truncation, options);
  }
  BandTable coarse = compute_bands(potential, cfg.grid(), max_band, cfg.truncation, options);
  const BandTable fine = compute_bands(potential, cfg.grid(), max_band, 2 * cfg.truncation, options);
  ConvergenceReport report = compare_tables(coarse, fine);
  return {std::move(coarse), report};
}

json report_json(const ConvergenceReport& r) {
  return {{"M", r.truncation},
          {"M_doubled", r.doubled_truncation},
          {"max_energy_deviation", r.max_energy_deviation},
          {"max_lambda_sum_deviation", r.max_lambda_sum_deviation},
          {"threshold", r.threshold},
          {"pass", r.pass}};
}

void print_convergence(std::ostream& out, const ConvergenceReport& r) {
  out << "convergence M=" << r.truncation << " vs " << r.doubled_truncation
      << ": max |d eps| = " << r.max_energy_deviation << ", max |d Lambda sums| = " << r.max_lambda_sum_deviation
      << (r.pass ? " (pass)" : " (FAIL)") << '\n';
}

std::vector<double> default_alphas() { return {0.01, 0.1, 1.0, 10.0}; }

std::vector<double> default_supp_alphas() {
  std::vector<double> out(50);
  for (int i = 0; i < 50; ++i) out[static_cast<std::size_t>(i)] = i == 49 ? 10.0 : 0.01 * std::pow(1000.0, i / 49.0);
  return out;
}

int cmd_bands(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const FourierPotential potential = cfg.dimensionless_potential();
  const ConvergedBands result = build_table(cfg, potential, cfg.required_max_band(), cfg.workers);
  const fs::path path = ctx.bands_out ? fs::path(*ctx.bands_out) : ctx.out_dir / "bands.csv";
  std::ofstream file = open_output(path);
  write_band_table(file, result.table,
                   {{"command", ctx.command}, {"config_hash", cfg.hash}, {"convergence", report_json(result.report)}});
  *ctx.out << "wrote " << path.string() << " (" << result.table.grid.count() * result.table.band_count()
           << " rows, M=" << result.table.truncation << ", J_max=" << result.table.max_band << ")\n";
  print_convergence(*ctx.out, result.report);
  if (!result.report.pass) *ctx.err << "warning: truncation M=" << result.table.truncation << " is not converged\n";
  return kSuccess;
}

int cmd_lambda(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> alphas = cfg.alphas.empty() ? default_alphas() : cfg.alphas;
  std::vector<std::optional<BandTable>> tables(alphas.size());
  parallel_for(alphas.size(), cfg.workers, [&](std::size_t a) {
    tables[a] = build_table(cfg, cosine_potential(alphas[a]), 0, 1).table;
  });

  json diagnostics = json::array();
  bool violation = false;
  const fs::path path = ctx.out_dir / "lambda.csv";
  std::ofstream file = open_output(path);
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const BandTable& table = *tables[a];
    const GridSupremum sup = grid_supremum(table, 0);
    const Eigen::Index zero = table.grid.zero_index();
    const double jump = lambda_single(table, 0, zero, ZeroSide::Right) - lambda_single(table, 0, zero, ZeroSide::Left);
    diagnostics.push_back({{"alpha", alphas[a]},
                           {"M", table.truncation},
                           {"grid_sup", sup.value},
                           {"grid_sup_z", sup.z},
                           {"sup_at_zero_plus", sup.at_zero_plus},
                           {"jump_at_zero", jump}});
    *ctx.out << "alpha=" << alphas[a] << ": sup Lambda = " << sup.value << " at z = " << sup.z
             << (sup.at_zero_plus ? "" : " (not at 0+)") << ", jump at 0 = " << jump << '\n';
    if (!(sup.value < 1.0)) violation = true;
  }
  file << metadata(ctx, {{"columns", {"alpha", "z", "lambda"}}, {"diagnostics", diagnostics}}).dump() << '\n';
  file << "alpha,z,lambda\n";
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const BandTable& table = *tables[a];
    const Eigen::VectorXd curve = lambda_curve(table, 0);
    const std::string alpha = format_double(alphas[a]);
    for (Eigen::Index i = 0; i < curve.size(); ++i) {
      file << alpha << ',' << format_double(table.grid[i]) << ',' << format_double(curve(i)) << '\n';
    }
  }
  *ctx.out << "wrote " << path.string() << '\n';
  if (ctx.self_check && violation) {
    *ctx.err << "self-check: Lambda reached 1\n";
    return kInvariantViolation;
  }
  return kSuccess;
}

/// sup P+ at the configured truncation, doubled until consecutive values agree to 1e-10.
SupremumReport converged_supremum(const RunConfig& cfg, double alpha) {
  SolverOptions options;
  options.degeneracy_tolerance = cfg.degeneracy_tolerance;
  SupremumReport coarse = sup_p_plus_cosine(alpha, cfg.truncation, options);
  if (!cfg.escalate) return coarse;
  while (true) {
    SupremumReport fine = sup_p_plus_cosine(alpha, 2 * coarse.truncation, options);
    if (std::abs(fine.sup_p - coarse.sup_p) <= 1e-10) return coarse;
    if (fine.truncation > cfg.max_truncation) {
      fail(ErrorCode::NumericalFailure, "sup P+ did not converge in M at alpha = " + format_double(alpha));
    }
    coarse = fine;
  }
}

int cmd_supp(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> alphas = cfg.alphas.empty() ? default_supp_alphas() : cfg.alphas;
  std::vector<SupremumReport> rows(alphas.size());
  parallel_for(alphas.size(), cfg.workers, [&](std::size_t a) { rows[a] = converged_supremum(cfg, alphas[a]); });

  const fs::path path = ctx.out_dir / "supp.csv";
  std::ofstream file = open_output(path);
  file << metadata(ctx, {{"columns", {"alpha", "sup_p", "asympt_strong", "asympt_weak", "f00", "symmetry_residual"}}})
              .dump()
       << '\n';
  file << "alpha,sup_p,asympt_strong,asympt_weak,f00,symmetry_residual\n";
  bool monotone = true;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const SupremumReport& r = rows[a];
    file << format_double(r.alpha) << ',' << format_double(r.sup_p) << ',' << format_double(asympt_strong(r.alpha))
         << ',' << format_double(asympt_weak(r.alpha)) << ',' << format_double(r.f00) << ','
         << format_double(r.symmetry_residual) << '\n';
    if (a > 0 && alphas[a] > alphas[a - 1] && !(r.sup_p < rows[a - 1].sup_p)) monotone = false;
  }
  *ctx.out << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
  if (ctx.self_check && !monotone) {
    *ctx.err << "self-check: sup P+ is not strictly decreasing in alpha\n";
    return kInvariantViolation;
  }
  return kSuccess;
}

std::vector<double> packet_times(const RunConfig& cfg) {
  return cfg.times.empty() ? std::vector<double>{0.0} : cfg.times;
}

/// Up to three oracle times: the configured list, else first, middle and last sample time.
std::vector<double> oracle_times(const RunConfig& cfg) {
  if (!cfg.oracle_times.empty()) return cfg.oracle_times;
  const std::vector<double> times = packet_times(cfg);
  std::vector<double> out{times.front()};
  if (times.size() > 2) out.push_back(times[times.size() / 2]);
  if (times.size() > 1) out.push_back(times.back());
  return out;
}

json oracle_json(const OracleResult& r) {
  return {{"time", r.time},
          {"p_direct", r.p_direct},
          {"p_spectral", r.p_spectral},
          {"abs_diff", r.abs_diff},
          {"window", r.half_width},
          {"samples", r.samples},
          {"norm_deficit", r.norm_deficit},
          {"momentum_norm", r.momentum_norm},
          {"refinement_change", r.refinement_change}};
}

OracleResult run_oracle(const RunConfig& cfg, const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                        double t) {
  const OracleConfig config = auto_oracle_config(table, amplitude, t, cfg.oracle_max_norm_deficit);
  return direct_p_plus(table, amplitude, config);
}

int cmd_ppos(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const FourierPotential potential = cfg.dimensionless_potential();
  const ConvergedBands bands = build_table(cfg, potential, cfg.required_max_band(), cfg.workers);
  const BandTable& table = bands.table;
  const QuasiMomentumAmplitude amplitude = cfg.build_amplitude(table.grid);
  const std::vector<double> times = packet_times(cfg);
  const PositivityReport report = p_plus_multiband(table, amplitude, times);

  const fs::path path = ctx.out_dir / "ppos.csv";
  std::ofstream file = open_output(path);
  file << metadata(ctx, {{"columns", {"t", "p_plus", "p_bar", "p_tilde"}},
                         {"M", table.truncation},
                         {"table_fingerprint", hex64(report.table_fingerprint)},
                         {"lambda_max", report.lambda_max},
                         {"lambda_argmax_z", report.lambda_argmax_z},
                         {"quadrature_deviation", report.quadrature_deviation},
                         {"quadrature_tolerance", report.quadrature_tolerance},
                         {"quadrature_ok", report.quadrature_ok},
                         {"max_imag_p_tilde", report.max_imag_p_tilde}})
              .dump()
       << '\n';
  file << "t,p_plus,p_bar,p_tilde\n";
  bool in_range = true;
  for (std::size_t s = 0; s < times.size(); ++s) {
    file << format_double(times[s]) << ',' << format_double(report.p_plus[s]) << ',' << format_double(report.p_bar)
         << ',' << format_double(report.p_tilde[s]) << '\n';
    if (report.p_plus[s] < -1e-8 || report.p_plus[s] > 1.0 + 1e-8) in_range = false;
  }
  file.close();
  *ctx.out << "wrote " << path.string() << " (" << times.size() << " rows, P-bar = " << report.p_bar << ")\n";
  if (!report.quadrature_ok) {
    *ctx.err << "warning: P-bar changed by " << report.quadrature_deviation
             << " between the grid and every other grid point\n";
  }
  if (!ctx.self_check) return kSuccess;

  int status = kSuccess;
  if (!in_range) {
    *ctx.err << "self-check: P+ left [0, 1]\n";
    status = kInvariantViolation;
  }
  if (!report.quadrature_ok) status = kInvariantViolation;
  for (const double t : oracle_times(cfg)) {
    const OracleResult r = run_oracle(cfg, table, amplitude, t);
    *ctx.out << "self-check t=" << t << ": direct " << r.p_direct << ", spectral " << r.p_spectral << ", |diff| "
             << r.abs_diff << '\n';
    if (!(r.abs_diff <= 1e-4)) {
      *ctx.err << "self-check: oracle disagrees at t = " << t << " by " << r.abs_diff << '\n';
      status = kInvariantViolation;
    }
  }
  return status;
}

int cmd_oracle(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const FourierPotential potential = cfg.dimensionless_potential();
  const ConvergedBands bands = build_table(cfg, potential, cfg.required_max_band(), cfg.workers);
  const QuasiMomentumAmplitude amplitude = cfg.build_amplitude(bands.table.grid);
  const std::vector<double> times = oracle_times(cfg);
  std::vector<OracleResult> results(times.size());
  parallel_for(times.size(), cfg.workers,
               [&](std::size_t s) { results[s] = run_oracle(cfg, bands.table, amplitude, times[s]); });

  const fs::path path = ctx.out_dir / "oracle.jsonl";
  std::ofstream file = open_output(path);
  file << metadata(ctx, {{"M", bands.table.truncation}}).dump() << '\n';
  int status = kSuccess;
  for (const OracleResult& r : results) {
    const std::string line = oracle_json(r).dump();
    file << line << '\n';
    *ctx.out << line << '\n';
    if (ctx.self_check && !(r.abs_diff <= 1e-4)) status = kInvariantViolation;
  }
  return status;
}

int cmd_convergence(const Context& ctx) {
  const RunConfig& cfg = ctx.config;
  const FourierPotential potential = cfg.dimensionless_potential();
  const ConvergenceReport report = check_convergence(potential, cfg.grid(), cfg.required_max_band(), cfg.truncation,
                                                     band_options(cfg, cfg.workers));
  const fs::path path = ctx.out_dir / "convergence.json";
  std::ofstream file = open_output(path);
  file << metadata(ctx).dump() << '\n';
  file << report_json(report).dump() << '\n';
  print_convergence(*ctx.out, report);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bloch bands and momentum positivity of Bloch wave packets", std::string(kToolName)};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
  std::optional<std::string> bands_out;
  bool self_check = false;
  app.add_option("--config", config_path, "TOML or JSON config file ('-' reads stdin)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--bands-out", bands_out, "band table path for 'bands'");
  app.add_flag("--self-check", self_check, "cross-check outputs and exit 5 on violation");

  std::string command;
  for (const char* name : {"bands", "lambda", "supp-sweep", "ppos", "oracle-check", "convergence"}) {
    app.add_subcommand(name)->callback([&command, name] { command = name; });
  }
  app.get_subcommand("bands")->description("diagonalize on the grid and write the band table");
  app.get_subcommand("lambda")->description("Lambda(z) of the lowest cosine band for each alpha");
  app.get_subcommand("supp-sweep")->description("largest attainable P+ against alpha with both asymptotics");
  app.get_subcommand("ppos")->description("P+(t), P-bar and P-tilde(t) of the configured packet");
  app.get_subcommand("oracle-check")->description("direct P+ from sampled Psi(x, t) against the spectral value");
  app.get_subcommand("convergence")->description("compare truncation M with 2M");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    Context ctx;
    ctx.config = config_path.empty() ? parse_config("", ConfigFormat::Toml) : load_config(config_path);
    if (workers) ctx.config.workers = *workers;
    if (out_dir) ctx.config.out_dir = *out_dir;
    ctx.command = command;
    ctx.out_dir = ctx.config.out_dir;
    ctx.bands_out = bands_out;
    ctx.self_check = self_check;
    ctx.out = &out;
    ctx.err = &err;
    if (command == "bands") return cmd_bands(ctx);
    if (command == "lambda") return cmd_lambda(ctx);
    if (command == "supp-sweep") return cmd_supp(ctx);
    if (command == "ppos") return cmd_ppos(ctx);
    if (command == "oracle-check") return cmd_oracle(ctx);
    return cmd_convergence(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace blochwp::cli
