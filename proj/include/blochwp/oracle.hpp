#pragma once

#include "blochwp/bands.hpp"
#include "blochwp/wavepacket.hpp"

namespace blochwp {

/// Real-space sampling window for the direct P+ computation: 2^exponent
/// samples of Psi(x, t) on [-half_width, half_width).
struct OracleConfig {
  double half_width = 256.0;
  int sample_exponent = 15;
  double time = 0.0;
  double max_norm_deficit = 1e-6;
  /// Successive estimates (window and sample count doubled) must agree to this.
  double refinement_tolerance = 1e-6;
  bool refine = true;
};

struct OracleResult {
  double time = 0.0;
  double p_direct = 0.0;
  double p_spectral = 0.0;
  double abs_diff = 0.0;
  double half_width = 0.0;
  long samples = 0;
  double norm_deficit = 0.0;
  /// Sum of |phi(k)|^2 dk over every DFT bin.
  double momentum_norm = 0.0;
  /// |p_direct - estimate with window and samples doubled|; 0 when not refined.
  double refinement_change = 0.0;
};

/// P+ from the discrete Fourier transform of sampled Psi(x, t): bins k >= 0
/// (half of the k = 0 bin counted as positive, plus the endpoint correction of
/// the half-line trapezoid sum). Returns the estimate at `config`
/// plus its window norm; does not consult any Lambda machinery.
struct DirectEstimate {
  double p_plus = 0.0;
  double window_norm = 0.0;
  double momentum_norm = 0.0;
};
DirectEstimate direct_estimate(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double half_width,
                               long samples, double t);

/// Direct P+ checked against the spectral value from the positivity module.
/// Throws nyquist-violation when pi / dx < M + 1, window-deficit when the
/// window misses more than max_norm_deficit of the norm and
/// numerical-failure when the refined estimate moves by more than the tolerance.
OracleResult direct_p_plus(const BandTable& table, const QuasiMomentumAmplitude& amplitude, const OracleConfig& config);

/// Smallest power-of-two window (starting at 32) whose norm deficit is below
/// the limit, with the sample count set by the Nyquist requirement.
OracleConfig auto_oracle_config(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double t,
                                double max_norm_deficit = 1e-6);

}  // namespace blochwp
