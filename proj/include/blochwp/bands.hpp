#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"

#include "blochwp/central_eq.hpp"
#include "blochwp/potential.hpp"

namespace blochwp {

/// Uniform, symmetric sampling of the open zone (-1/2 + margin, 1/2 - margin).
/// The count is odd so that z = 0 is a sample; that sample carries the
/// right-limit convention (z -> 0+) wherever a step function of z is evaluated.
class BrillouinGrid {
 public:
  static constexpr int kDefaultCount = 2001;
  static constexpr double kDefaultMargin = 1e-6;

  explicit BrillouinGrid(int count = kDefaultCount, double margin = kDefaultMargin);

  int count() const noexcept { return static_cast<int>(z_.size()); }
  double margin() const noexcept { return margin_; }
  double spacing() const noexcept { return spacing_; }
  Eigen::Index zero_index() const noexcept { return (z_.size() - 1) / 2; }
  const Eigen::VectorXd& values() const noexcept { return z_; }
  double operator[](Eigen::Index i) const { return z_(i); }

  bool operator==(const BrillouinGrid&) const = default;

 private:
  double margin_;
  double spacing_;
  Eigen::VectorXd z_;
};

/// Band energies and gauge-fixed Fourier coefficients over a grid.
///
/// energies(j, i) is the dimensionless band energy of band j at grid point i;
/// coefficients[j].col(i) holds f_n for n = -M..M (row n + M), normalized to
/// sum |f_n|^2 = 1/(2 pi) with the largest-modulus entry real and positive.
struct BandTable {
  FourierPotential potential;
  BrillouinGrid grid;
  int truncation = 0;
  int max_band = 0;
  Eigen::MatrixXd energies;
  std::vector<Eigen::MatrixXcd> coefficients;

  int band_count() const noexcept { return max_band + 1; }
  std::uint64_t fingerprint() const noexcept { return potential.fingerprint(); }

  /// f_n of band j at grid point i; zero outside the stored range.
  std::complex<double> coefficient(int band, Eigen::Index i, int n) const {
    if (n < -truncation || n > truncation) return 0.0;
    return coefficients[static_cast<std::size_t>(band)](n + truncation, i);
  }
};

struct BandOptions {
  SolverOptions solver;
  int workers = 1;
};

BandTable compute_bands(const FourierPotential& potential, const BrillouinGrid& grid, int max_band, int truncation,
                        const BandOptions& options = {});

/// Rotates the vector by a unit phase so its largest-modulus entry is real and
/// positive; equal moduli (to 1e-12 relative) go to the lowest index.
Eigen::VectorXcd gauge_fix(const Eigen::VectorXcd& coefficients);

/// Gauge-fixed solutions at a single z (used by callers that bypass the grid).
EigenPairSet solve_gauged(const FourierPotential& potential, double z, int truncation, int count,
                          const SolverOptions& options = {});

struct ConvergenceReport {
  int truncation = 0;
  int doubled_truncation = 0;
  double max_energy_deviation = 0.0;
  /// Largest change in 2 pi |f_0|^2 or 2 pi sum_{n>=1} |f_n|^2.
  double max_lambda_sum_deviation = 0.0;
  double threshold = 1e-10;
  bool pass = false;
};

/// Compares runs at M and 2M over the whole grid.
ConvergenceReport check_convergence(const FourierPotential& potential, const BrillouinGrid& grid, int max_band,
                                    int truncation, const BandOptions& options = {});

ConvergenceReport compare_tables(const BandTable& coarse, const BandTable& fine, double threshold = 1e-10);

/// compute_bands with the truncation doubled until the M-vs-2M check passes
/// (at most `max_truncation`). The returned table uses the passing M.
struct ConvergedBands {
  BandTable table;
  ConvergenceReport report;
};
ConvergedBands compute_bands_converged(const FourierPotential& potential, const BrillouinGrid& grid, int max_band,
                                       int truncation, int max_truncation = 1600, const BandOptions& options = {});

/// Text format: one JSON header line, one CSV column line, then rows
/// z,j,epsilon,re(f_-M),im(f_-M),...,re(f_M),im(f_M). Doubles are written in
/// shortest round-trip form, so reading back reproduces the table bit for bit.
/// Keys of `extra` (e.g. command and config hash) are added to the header.
void write_band_table(std::ostream& out, const BandTable& table, const nlohmann::json& extra = nlohmann::json::object());
BandTable read_band_table(std::istream& in);

}  // namespace blochwp
