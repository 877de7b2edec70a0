#include "blochwp/oracle.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "blochwp/error.hpp"
#include "blochwp/positivity.hpp"

namespace blochwp {

namespace {

constexpr double kPi = std::numbers::pi;

long nyquist_samples(const BandTable& table, double half_width) {
  // pi / dx >= M + 1 with dx = 2X / N
  const double needed = 2.0 * half_width * (table.truncation + 1) / kPi;
  long n = 1;
  while (double(n) < needed) n *= 2;
  return n;
}

}  // namespace

DirectEstimate direct_estimate(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double half_width,
                               long samples, double t) {
  require(samples >= 4 && half_width > 0.0, ErrorCode::InvalidArgument, "oracle window needs samples and width");
  const double dx = 2.0 * half_width / double(samples);
  std::vector<double> x(static_cast<std::size_t>(samples));
  for (long m = 0; m < samples; ++m) x[static_cast<std::size_t>(m)] = -half_width + double(m) * dx;
  const Eigen::VectorXcd psi = position_wavefunction(table, amplitude, x, t);

  DirectEstimate out;
  out.window_norm = psi.squaredNorm() * dx;

  std::vector<std::complex<double>> in(psi.data(), psi.data() + psi.size());
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);

  // |phi(k_p)|^2 = dx^2 / (2 pi) |DFT_p|^2, k_p = 2 pi p / (N dx); bins 0 < p < N/2 are k > 0
  // and the k = 0 bin straddles zero, so its upper half counts as positive
  const double dk = 2.0 * kPi / (double(samples) * dx);
  const double scale = dx * dx / (2.0 * kPi);
  auto density = [&](long p) { return std::norm(spectrum[static_cast<std::size_t>((p + samples) % samples)]) * scale; };
  for (long p = 0; p < samples; ++p) {
    const double weight = density(p) * dk;
    out.momentum_norm += weight;
    if (p == 0) out.p_plus += 0.5 * weight;
    else if (p < samples / 2) out.p_plus += weight;
  }
  // Euler-Maclaurin endpoint terms of the half-line trapezoid sum, dk^2/12 g'(0) - dk^4/720 g'''(0),
  // with the derivatives of g = |phi|^2 from centred differences across k = 0
  const double d1 = (-density(2) + 8.0 * density(1) - 8.0 * density(-1) + density(-2)) / (12.0 * dk);
  const double d3 = (density(2) - 2.0 * density(1) + 2.0 * density(-1) - density(-2)) / (2.0 * dk * dk * dk);
  out.p_plus += dk * dk / 12.0 * d1 - std::pow(dk, 4) / 720.0 * d3;
  return out;
}

OracleResult direct_p_plus(const BandTable& table, const QuasiMomentumAmplitude& amplitude, const OracleConfig& config) {
  require(config.sample_exponent >= 2 && config.sample_exponent <= 26, ErrorCode::InvalidArgument,
          "oracle sample exponent out of range");
  const long samples = 1L << config.sample_exponent;
  const double dx = 2.0 * config.half_width / double(samples);
  if (kPi / dx < table.truncation + 1) {
    std::ostringstream msg;
    msg << "Nyquist momentum " << kPi / dx << " is below M + 1 = " << table.truncation + 1;
    fail(ErrorCode::NyquistViolation, msg.str());
  }

  OracleResult out;
  out.time = config.time;
  out.half_width = config.half_width;
  out.samples = samples;

  const DirectEstimate base = direct_estimate(table, amplitude, config.half_width, samples, config.time);
  out.norm_deficit = amplitude.norm() - base.window_norm;
  if (out.norm_deficit > config.max_norm_deficit) {
    std::ostringstream msg;
    msg << "window [-" << config.half_width << ", " << config.half_width << ") misses " << out.norm_deficit
        << " of the packet norm";
    fail(ErrorCode::WindowDeficit, msg.str());
  }
  out.p_direct = base.p_plus;
  out.momentum_norm = base.momentum_norm;

  if (config.refine) {
    const DirectEstimate refined =
        direct_estimate(table, amplitude, 2.0 * config.half_width, 2 * samples, config.time);
    out.refinement_change = std::abs(refined.p_plus - base.p_plus);
    if (!(out.refinement_change < config.refinement_tolerance)) {
      std::ostringstream msg;
      msg << "direct P+ moved by " << out.refinement_change << " when window and samples doubled";
      fail(ErrorCode::NumericalFailure, msg.str());
    }
  }

  const double times[] = {config.time};
  out.p_spectral = p_plus_multiband(table, amplitude, times).p_plus.front();
  out.abs_diff = std::abs(out.p_direct - out.p_spectral);
  return out;
}

OracleConfig auto_oracle_config(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double t,
                                double max_norm_deficit) {
  const double total = amplitude.norm();
  for (double half_width = 32.0; half_width <= 65536.0; half_width *= 2.0) {
    const long samples = nyquist_samples(table, half_width);
    const DirectEstimate estimate = direct_estimate(table, amplitude, half_width, samples, t);
    if (total - estimate.window_norm <= max_norm_deficit) {
      OracleConfig config;
      config.half_width = half_width;
      config.sample_exponent = static_cast<int>(std::lround(std::log2(double(samples))));
      config.time = t;
      config.max_norm_deficit = max_norm_deficit;
      return config;
    }
  }
  fail(ErrorCode::WindowDeficit, "no oracle window up to half-width 65536 holds the packet");
}

}  // namespace blochwp
