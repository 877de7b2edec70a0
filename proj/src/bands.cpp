#include "blochwp/bands.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "blochwp/error.hpp"
#include "blochwp/io.hpp"
#include "blochwp/parallel.hpp"

namespace blochwp {

BrillouinGrid::BrillouinGrid(int count, double margin) : margin_(margin) {
  require(count >= 3 && count % 2 == 1, ErrorCode::InvalidArgument,
          "grid count must be odd and at least 3, got " + std::to_string(count));
  require(std::isfinite(margin) && margin > 0.0 && margin < 0.5, ErrorCode::InvalidArgument,
          "zone margin must lie in (0, 1/2)");
  const int half = (count - 1) / 2;
  spacing_ = (0.5 - margin) / half;
  z_.resize(count);
  for (int i = 0; i < count; ++i) z_(i) = (i - half) * spacing_;
  // pin the endpoints so they sit exactly at +-(1/2 - margin)
  z_(0) = -(0.5 - margin);
  z_(count - 1) = 0.5 - margin;
}

Eigen::VectorXcd gauge_fix(const Eigen::VectorXcd& coefficients) {
  const Eigen::VectorXd moduli = coefficients.cwiseAbs();
  const double largest = coefficients.size() ? moduli.maxCoeff() : 0.0;
  require(largest > 0.0 && std::isfinite(largest), ErrorCode::InvalidArgument, "cannot gauge-fix a zero vector");
  Eigen::Index pick = 0;
  while (moduli(pick) < largest * (1.0 - 1e-12)) ++pick;
  const std::complex<double> phase = std::conj(coefficients(pick)) / moduli(pick);
  Eigen::VectorXcd out = coefficients * phase;
  out(pick) = moduli(pick);
  return out;
}

EigenPairSet solve_gauged(const FourierPotential& potential, double z, int truncation, int count,
                          const SolverOptions& options) {
  EigenPairSet pairs = eigen_lowest(build_central_matrix(potential, z, truncation), count, options);
  for (int j = 0; j < count; ++j) pairs.eigenvectors.col(j) = gauge_fix(pairs.eigenvectors.col(j));
  return pairs;
}

BandTable compute_bands(const FourierPotential& potential, const BrillouinGrid& grid, int max_band, int truncation,
                        const BandOptions& options) {
  require(max_band >= 0, ErrorCode::InvalidArgument, "J_max must be non-negative");
  const int count = max_band + 1;
  const Eigen::Index dim = 2 * Eigen::Index(truncation) + 1;
  require(truncation >= 0 && count <= dim, ErrorCode::TruncationTooSmall,
          "truncation M = " + std::to_string(truncation) + " cannot hold " + std::to_string(count) + " bands");

  BandTable table{potential, grid, truncation, max_band, Eigen::MatrixXd(count, grid.count()), {}};
  table.coefficients.assign(static_cast<std::size_t>(count), Eigen::MatrixXcd(dim, grid.count()));

  parallel_for(static_cast<std::size_t>(grid.count()), options.workers, [&](std::size_t idx) {
    const auto i = static_cast<Eigen::Index>(idx);
    const EigenPairSet pairs = solve_gauged(potential, grid[i], truncation, count, options.solver);
    table.energies.col(i) = pairs.eigenvalues;
    for (int j = 0; j < count; ++j) table.coefficients[static_cast<std::size_t>(j)].col(i) = pairs.eigenvectors.col(j);
  });

  for (int j = 0; j + 1 < count; ++j) {
    const double gap = table.energies.row(j + 1).minCoeff() - table.energies.row(j).maxCoeff();
    if (!(gap > 0.0)) {
      std::ostringstream msg;
      msg << "bands " << j << " and " << j + 1 << " overlap on the grid (min upper - max lower = " << gap << ")";
      fail(ErrorCode::BandOverlap, msg.str());
    }
  }
  return table;
}

ConvergenceReport compare_tables(const BandTable& coarse, const BandTable& fine, double threshold) {
  require(coarse.grid == fine.grid && coarse.max_band == fine.max_band, ErrorCode::InvalidArgument,
          "convergence comparison needs identical grids and band counts");
  ConvergenceReport report;
  report.truncation = coarse.truncation;
  report.doubled_truncation = fine.truncation;
  report.threshold = threshold;
  report.max_energy_deviation = (coarse.energies - fine.energies).cwiseAbs().maxCoeff();

  const double two_pi = 2.0 * std::numbers::pi;
  auto sums = [&](const BandTable& t, int j, Eigen::Index i) {
    const auto& f = t.coefficients[static_cast<std::size_t>(j)];
    const double zero = two_pi * std::norm(f(t.truncation, i));
    const double positive = two_pi * f.col(i).tail(t.truncation).squaredNorm();
    return std::pair{zero, positive};
  };
  double worst = 0.0;
  for (int j = 0; j < coarse.band_count(); ++j) {
    for (Eigen::Index i = 0; i < coarse.grid.count(); ++i) {
      const auto [c0, cp] = sums(coarse, j, i);
      const auto [f0, fp] = sums(fine, j, i);
      worst = std::max({worst, std::abs(c0 - f0), std::abs(cp - fp)});
    }
  }
  report.max_lambda_sum_deviation = worst;
  report.pass = report.max_energy_deviation < threshold && report.max_lambda_sum_deviation < threshold;
  return report;
}

ConvergenceReport check_convergence(const FourierPotential& potential, const BrillouinGrid& grid, int max_band,
                                    int truncation, const BandOptions& options) {
  const BandTable coarse = compute_bands(potential, grid, max_band, truncation, options);
  const BandTable fine = compute_bands(potential, grid, max_band, 2 * truncation, options);
  return compare_tables(coarse, fine);
}

ConvergedBands compute_bands_converged(const FourierPotential& potential, const BrillouinGrid& grid, int max_band,
                                       int truncation, int max_truncation, const BandOptions& options) {
  BandTable coarse = compute_bands(potential, grid, max_band, truncation, options);
  while (true) {
    BandTable fine = compute_bands(potential, grid, max_band, 2 * coarse.truncation, options);
    ConvergenceReport report = compare_tables(coarse, fine);
    if (report.pass) return {std::move(coarse), report};
    if (fine.truncation > max_truncation) {
      std::ostringstream msg;
      msg << "truncation did not converge up to M = " << fine.truncation << " (energy deviation "
          << report.max_energy_deviation << ", coefficient-sum deviation " << report.max_lambda_sum_deviation << ")";
      fail(ErrorCode::NumericalFailure, msg.str());
    }
    coarse = std::move(fine);
  }
}

void write_band_table(std::ostream& out, const BandTable& table, const nlohmann::json& extra) {
  nlohmann::json header = {
      {"format", "blochwp-bands"},
      {"tool", kToolName},
      {"version", kToolVersion},
      {"potential", potential_to_json(table.potential)},
      {"potential_fingerprint", hex64(table.fingerprint())},
      {"M", table.truncation},
      {"J_max", table.max_band},
      {"grid", {{"count", table.grid.count()}, {"delta_z", table.grid.margin()}}},
      {"conventions", conventions_json()},
  };
  for (const auto& [key, value] : extra.items()) header[key] = value;
  out << header.dump() << '\n';
  out << "z,j,epsilon";
  for (int n = -table.truncation; n <= table.truncation; ++n) out << ",re_f" << n << ",im_f" << n;
  out << '\n';
  for (int j = 0; j < table.band_count(); ++j) {
    const auto& f = table.coefficients[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < table.grid.count(); ++i) {
      out << format_double(table.grid[i]) << ',' << j << ',' << format_double(table.energies(j, i));
      for (Eigen::Index r = 0; r < f.rows(); ++r) {
        out << ',' << format_double(f(r, i).real()) << ',' << format_double(f(r, i).imag());
      }
      out << '\n';
    }
  }
}

BandTable read_band_table(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::InvalidArgument, "band file is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidArgument, std::string("band file header is not JSON: ") + e.what());
  }
  require(header.value("format", "") == "blochwp-bands", ErrorCode::InvalidArgument, "not a band table file");

  const int truncation = header.at("M").get<int>();
  const int max_band = header.at("J_max").get<int>();
  const BrillouinGrid grid(header.at("grid").at("count").get<int>(), header.at("grid").at("delta_z").get<double>());
  const Eigen::Index dim = 2 * Eigen::Index(truncation) + 1;
  BandTable table{potential_from_json(header.at("potential")), grid, truncation, max_band,
                  Eigen::MatrixXd(max_band + 1, grid.count()), {}};
  table.coefficients.assign(static_cast<std::size_t>(max_band + 1), Eigen::MatrixXcd(dim, grid.count()));

  require(static_cast<bool>(std::getline(in, line)) && line.rfind("z,j,epsilon", 0) == 0, ErrorCode::InvalidArgument,
          "band file is missing its column header");

  std::vector<std::string_view> fields;
  for (int j = 0; j <= max_band; ++j) {
    for (Eigen::Index i = 0; i < grid.count(); ++i) {
      require(static_cast<bool>(std::getline(in, line)), ErrorCode::InvalidArgument, "band file is truncated");
      fields.clear();
      std::string_view rest(line);
      for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
        fields.push_back(rest.substr(0, pos));
      }
      fields.push_back(rest);
      require(static_cast<Eigen::Index>(fields.size()) == 3 + 2 * dim, ErrorCode::InvalidArgument,
              "band file row has the wrong number of columns");
      require(parse_double(fields[0]) == grid[i] && parse_double(fields[1]) == j, ErrorCode::InvalidArgument,
              "band file rows are out of order");
      table.energies(j, i) = parse_double(fields[2]);
      auto& f = table.coefficients[static_cast<std::size_t>(j)];
      for (Eigen::Index r = 0; r < dim; ++r) {
        f(r, i) = {parse_double(fields[3 + 2 * r]), parse_double(fields[4 + 2 * r])};
      }
    }
  }
  return table;
}

}  // namespace blochwp
