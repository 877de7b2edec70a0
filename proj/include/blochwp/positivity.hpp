#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "blochwp/bands.hpp"
#include "blochwp/wavepacket.hpp"

namespace blochwp {

/// Which one-sided limit the step function takes at z = 0.
enum class ZeroSide { Right, Left };

/// Lambda_J(z) = 2 pi |f_0|^2 Theta(z) + 2 pi sum_{n >= 1} |f_n|^2 at grid point i.
/// At the z = 0 sample Theta is 1 for ZeroSide::Right (the reported value) and 0 for Left.
double lambda_single(const BandTable& table, int band, Eigen::Index i, ZeroSide side = ZeroSide::Right);

/// Off-grid variant: the two coefficient sums are interpolated separately,
/// which keeps the jump at z = 0 sharp.
double lambda_single_at(const BandTable& table, int band, double z);

/// Lambda over the whole grid, right limit at z = 0.
Eigen::VectorXd lambda_curve(const BandTable& table, int band);

/// Lambda^(j, j')(z) = 2 pi conj(f_0^j) f_0^j' Theta(z) + 2 pi sum_{n >= 1} conj(f_n^j) f_n^j'.
/// Throws wrong-operation for j == j'.
std::complex<double> lambda_cross(const BandTable& table, int band, int other, Eigen::Index i,
                                  ZeroSide side = ZeroSide::Right);

struct GridSupremum {
  double value = 0.0;
  Eigen::Index index = 0;
  double z = 0.0;
  /// True when the maximum sits at the right-limit z = 0 sample or at the first positive sample.
  bool at_zero_plus = false;
};

GridSupremum grid_supremum(const BandTable& table, int band);

struct PositivityReport {
  std::vector<double> times;
  /// One value for a single-band packet, otherwise one per time.
  std::vector<double> p_plus;
  double p_bar = 0.0;
  std::vector<double> p_tilde;
  double max_imag_p_tilde = 0.0;

  double lambda_max = 0.0;
  double lambda_argmax_z = 0.0;

  /// |fine - coarse| for the Simpson estimate of P-bar on the grid and on every other point.
  double quadrature_deviation = 0.0;
  bool quadrature_checked = false;
  bool quadrature_ok = true;
  double quadrature_tolerance = 1e-8;

  bool strictly_below_one = true;
  std::uint64_t table_fingerprint = 0;
};

/// Time-independent P+ = int Lambda |phi|^2 dz of a single-band packet.
/// Throws wrong-operation for multi-band amplitudes.
PositivityReport p_plus_single(const BandTable& table, const QuasiMomentumAmplitude& amplitude);

/// P+(t) = P-bar + P-tilde(t) for any packet (a single band gives P-tilde = 0).
/// Throws band-overlap when occupied bands overlap on the grid and
/// invariant-violation when Im P-tilde exceeds 1e-10 or P-bar reaches 1.
PositivityReport p_plus_multiband(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                  std::span<const double> times);

struct SupremumReport {
  double alpha = 0.0;
  int truncation = 0;
  double sup_p = 0.0;
  double f00 = 0.0;
  /// max_n |f_{-n} - f_n| of the gauge-fixed lowest z = 0 eigenvector.
  double symmetry_residual = 0.0;
  /// 2 pi sum_{n >= 0} |f_n|^2 without using the symmetry.
  double direct_sum = 0.0;
  double ground_energy = 0.0;
};

/// Largest attainable P+ in the lowest band of the cosine potential,
/// 1/2 + pi |f_0(0)|^2, from the z = 0 eigenproblem alone.
SupremumReport sup_p_plus_cosine(double alpha, int truncation = 100, const SolverOptions& options = {});

/// 1/2 + alpha^{-1/4} / (2 sqrt(pi)).
double asympt_strong(double alpha);
/// 1 - alpha^2.
double asympt_weak(double alpha);
/// (1 - alpha^2) / sqrt(2 pi).
double perturbative_f00(double alpha);
/// First-order scaled neighbours g_{+-1} = sqrt(2 pi) f_{+-1}(0) = -alpha.
double perturbative_g1(double alpha);
/// alpha^{-1/8} / (sqrt(2) pi^{3/4}).
double harmonic_f00(double alpha);

}  // namespace blochwp
