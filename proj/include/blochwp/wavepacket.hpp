#pragma once

#include <Eigen/Core>

#include <complex>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "blochwp/bands.hpp"

namespace blochwp {

/// Per-band quasi-momentum amplitudes phi_j(z), sampled on a BrillouinGrid.
/// Every band's samples vanish at both ends of the grid, so the support lies
/// strictly inside the zone.
///
/// The relative phase between bands is only meaningful together with the
/// eigenvector gauge of the BandTable it is combined with (see gauge_fix);
/// tabulated amplitudes must be expressed in that gauge.
class QuasiMomentumAmplitude {
 public:
  QuasiMomentumAmplitude(BrillouinGrid grid, std::map<int, Eigen::VectorXcd> bands);

  const BrillouinGrid& grid() const noexcept { return grid_; }
  const std::map<int, Eigen::VectorXcd>& bands() const noexcept { return bands_; }
  const Eigen::VectorXcd& band(int j) const;
  bool single_band() const noexcept { return bands_.size() == 1; }
  int max_band() const noexcept { return bands_.rbegin()->first; }

  /// Index range [first, last] of nonzero samples of band j.
  std::pair<Eigen::Index, Eigen::Index> support(int j) const;

  /// sum_j of the Simpson integral of |phi_j|^2 over the grid.
  double norm() const;
  QuasiMomentumAmplitude normalized() const;
  QuasiMomentumAmplitude scaled(std::complex<double> factor) const;

  /// Sum of two amplitudes on the same grid (bands are merged).
  friend QuasiMomentumAmplitude operator+(const QuasiMomentumAmplitude& a, const QuasiMomentumAmplitude& b);

 private:
  BrillouinGrid grid_;
  std::map<int, Eigen::VectorXcd> bands_;
};

/// Unit-norm smooth bump exp(-1/(1 - u^2)), u = (z - center)/halfwidth, in band j.
/// Throws support-violation unless [center - w, center + w] lies inside the grid range.
QuasiMomentumAmplitude make_bump(const BrillouinGrid& grid, int band, double center, double halfwidth);

/// Reads CSV rows `z,j,re,im` (an optional header line is skipped). Each z must
/// be a grid sample; unlisted samples are zero. The result is not normalized.
QuasiMomentumAmplitude read_amplitude_csv(std::istream& in, const BrillouinGrid& grid);

/// Nearest-integer folding index n = [k] (halves away from zero).
int folding_index(double k);

/// Momentum wave function at dimensionless momentum k and time t,
/// sum_j sqrt(2 pi) phi_j(k - n) f_n^(j)(k - n) exp(-i eps_j(k - n) t), n = [k].
/// Off-grid arguments use cubic interpolation of phi, f_n and eps. Throws
/// folding-seam when k is within the grid margin of a half-integer.
std::complex<double> momentum_wavefunction(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double k,
                                           double t);

/// Contribution of a single band j to the momentum wave function.
std::complex<double> momentum_wavefunction_band(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                                int band, double k, double t);

struct MomentumDistribution {
  double time = 0.0;
  Eigen::VectorXd k_values;
  Eigen::VectorXd density;
  Eigen::VectorXi folding;
};

MomentumDistribution momentum_distribution(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                           std::span<const double> k_values, double t);

/// Integral of |phi(k, t)|^2 over all k, evaluated on the folded grid
/// k = z_i + n for every stored n.
double momentum_norm(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double t);

/// Psi(x, t) = sum_j int dz phi_j(z) exp(-i eps_j t) exp(i z x) sum_n f_n exp(i n x),
/// Simpson over the grid, x in units of 1/q.
Eigen::VectorXcd position_wavefunction(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                       std::span<const double> x_values, double t);

std::complex<double> position_wavefunction(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double x,
                                           double t);

}  // namespace blochwp
