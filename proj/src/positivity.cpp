#include "blochwp/positivity.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "blochwp/error.hpp"
#include "blochwp/quadrature.hpp"

namespace blochwp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_band(const BandTable& table, int band) {
  require(band >= 0 && band <= table.max_band, ErrorCode::InvalidArgument,
          "band " + std::to_string(band) + " is not in the table (J_max = " + std::to_string(table.max_band) + ")");
}

bool theta(const BandTable& table, Eigen::Index i, ZeroSide side) {
  const Eigen::Index zero = table.grid.zero_index();
  if (i == zero) return side == ZeroSide::Right;
  return i > zero;
}

/// Integral over the grid of a quantity that jumps at z = 0. `value(i, side)`
/// is evaluated with the left limit on the z <= 0 half and the right limit on
/// the z >= 0 half; each half is integrated separately. `stride` 2 gives the
/// coarse estimate used for the refinement check.
template <typename Scalar, typename Value>
Scalar split_integral(const BrillouinGrid& grid, Value&& value, Eigen::Index stride = 1) {
  const Eigen::Index zero = grid.zero_index();
  const Eigen::Index count = zero / stride + 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> left(count), right(count);
  for (Eigen::Index s = 0; s < count; ++s) {
    left(s) = value(s * stride, ZeroSide::Left);
    right(s) = value(zero + s * stride, ZeroSide::Right);
  }
  const double h = grid.spacing() * double(stride);
  return simpson(left, h) + simpson(right, h);
}

struct BandSums {
  double zero;
  double positive;
};

BandSums band_sums(const BandTable& table, int band, Eigen::Index i) {
  const auto& f = table.coefficients[static_cast<std::size_t>(band)];
  return {kTwoPi * std::norm(f(table.truncation, i)), kTwoPi * f.col(i).tail(table.truncation).squaredNorm()};
}

void check_occupied_bands_separated(const BandTable& table, const QuasiMomentumAmplitude& amplitude) {
  int previous = -1;
  for (const auto& [j, samples] : amplitude.bands()) {
    if (previous >= 0) {
      const double gap = table.energies.row(j).minCoeff() - table.energies.row(previous).maxCoeff();
      if (!(gap > 0.0)) {
        std::ostringstream msg;
        msg << "occupied bands " << previous << " and " << j << " overlap (gap " << gap << ")";
        fail(ErrorCode::BandOverlap, msg.str());
      }
    }
    previous = j;
  }
}

double p_bar_integral(const BandTable& table, const QuasiMomentumAmplitude& amplitude, Eigen::Index stride) {
  double total = 0.0;
  for (const auto& [j, phi] : amplitude.bands()) {
    total += split_integral<double>(
        table.grid,
        [&](Eigen::Index i, ZeroSide side) { return lambda_single(table, j, i, side) * std::norm(phi(i)); }, stride);
  }
  return total;
}

void fill_common(const BandTable& table, const QuasiMomentumAmplitude& amplitude, PositivityReport& report) {
  report.table_fingerprint = table.fingerprint();
  report.lambda_max = -1.0;
  for (const auto& [j, phi] : amplitude.bands()) {
    const GridSupremum sup = grid_supremum(table, j);
    if (sup.value > report.lambda_max) {
      report.lambda_max = sup.value;
      report.lambda_argmax_z = sup.z;
    }
  }
  report.p_bar = p_bar_integral(table, amplitude, 1);
  const Eigen::Index zero = table.grid.zero_index();
  report.quadrature_checked = zero % 2 == 0;
  if (report.quadrature_checked) {
    report.quadrature_deviation = std::abs(report.p_bar - p_bar_integral(table, amplitude, 2));
    report.quadrature_ok = report.quadrature_deviation <= report.quadrature_tolerance;
  }
}

}  // namespace

double lambda_single(const BandTable& table, int band, Eigen::Index i, ZeroSide side) {
  check_band(table, band);
  const BandSums s = band_sums(table, band, i);
  return (theta(table, i, side) ? s.zero : 0.0) + s.positive;
}

double lambda_single_at(const BandTable& table, int band, double z) {
  check_band(table, band);
  const Eigen::Index count = table.grid.count();
  Eigen::VectorXd zero(count), positive(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const BandSums s = band_sums(table, band, i);
    zero(i) = s.zero;
    positive(i) = s.positive;
  }
  const double z0 = table.grid[0];
  const double h = table.grid.spacing();
  const double step = z >= 0.0 ? 1.0 : 0.0;
  return step * cubic_interpolate(zero, z0, h, z) + cubic_interpolate(positive, z0, h, z);
}

Eigen::VectorXd lambda_curve(const BandTable& table, int band) {
  Eigen::VectorXd out(table.grid.count());
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = lambda_single(table, band, i);
  return out;
}

std::complex<double> lambda_cross(const BandTable& table, int band, int other, Eigen::Index i, ZeroSide side) {
  check_band(table, band);
  check_band(table, other);
  require(band != other, ErrorCode::WrongOperation, "lambda_cross needs two different bands; use lambda_single");
  const auto& f = table.coefficients[static_cast<std::size_t>(band)];
  const auto& g = table.coefficients[static_cast<std::size_t>(other)];
  const Eigen::Index m = table.truncation;
  std::complex<double> sum = f.col(i).tail(m).dot(g.col(i).tail(m));
  if (theta(table, i, side)) sum += std::conj(f(m, i)) * g(m, i);
  return kTwoPi * sum;
}

GridSupremum grid_supremum(const BandTable& table, int band) {
  const Eigen::VectorXd curve = lambda_curve(table, band);
  GridSupremum out;
  out.value = curve.maxCoeff(&out.index);
  out.z = table.grid[out.index];
  const Eigen::Index zero = table.grid.zero_index();
  out.at_zero_plus = out.index == zero || out.index == zero + 1;
  return out;
}

PositivityReport p_plus_single(const BandTable& table, const QuasiMomentumAmplitude& amplitude) {
  require(amplitude.single_band(), ErrorCode::WrongOperation,
          "p_plus_single needs a single-band amplitude; use p_plus_multiband");
  check_band(table, amplitude.max_band());
  require(table.grid == amplitude.grid(), ErrorCode::InvalidArgument, "amplitude and table grids differ");
  PositivityReport report;
  fill_common(table, amplitude, report);
  report.p_plus = {report.p_bar};
  report.strictly_below_one = report.p_bar < 1.0;
  return report;
}

PositivityReport p_plus_multiband(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                  std::span<const double> times) {
  check_band(table, amplitude.max_band());
  require(table.grid == amplitude.grid(), ErrorCode::InvalidArgument, "amplitude and table grids differ");
  check_occupied_bands_separated(table, amplitude);

  PositivityReport report;
  fill_common(table, amplitude, report);
  report.times.assign(times.begin(), times.end());
  report.strictly_below_one = report.p_bar < 1.0;
  if (table.potential.order() >= 1 && !report.strictly_below_one) {
    fail(ErrorCode::InvariantViolation, "P-bar reached one for a non-constant potential");
  }

  // Per ordered pair (j, j'): Simpson-weighted Lambda^(j,j') conj(phi_j) phi_j'
  // and the beat frequency eps_j - eps_j', with the jump at z = 0 handled by
  // assigning left-limit weights to the z <= 0 half.
  struct PairTerm {
    Eigen::VectorXcd weight;
    Eigen::VectorXd frequency;
  };
  std::vector<PairTerm> terms;
  const Eigen::Index zero = table.grid.zero_index();
  const Eigen::VectorXd half_weights = simpson_weights(zero + 1, table.grid.spacing());
  for (const auto& [j, phi_j] : amplitude.bands()) {
    for (const auto& [jp, phi_jp] : amplitude.bands()) {
      if (j == jp) continue;
      const auto [a_first, a_last] = amplitude.support(j);
      const auto [b_first, b_last] = amplitude.support(jp);
      const Eigen::Index first = std::max(a_first, b_first);
      const Eigen::Index last = std::min(a_last, b_last);
      if (first > last) continue;
      PairTerm term{Eigen::VectorXcd::Zero(last - first + 1), Eigen::VectorXd(last - first + 1)};
      for (Eigen::Index i = first; i <= last; ++i) {
        const std::complex<double> density = std::conj(phi_j(i)) * phi_jp(i);
        std::complex<double> w = 0.0;
        if (i <= zero) w += half_weights(i) * lambda_cross(table, j, jp, i, ZeroSide::Left);
        if (i >= zero) w += half_weights(i - zero) * lambda_cross(table, j, jp, i, ZeroSide::Right);
        term.weight(i - first) = w * density;
        term.frequency(i - first) = table.energies(j, i) - table.energies(jp, i);
      }
      terms.push_back(std::move(term));
    }
  }

  report.p_tilde.reserve(times.size());
  report.p_plus.reserve(times.size());
  for (const double t : times) {
    std::complex<double> tilde = 0.0;
    for (const auto& term : terms) {
      for (Eigen::Index s = 0; s < term.weight.size(); ++s) tilde += term.weight(s) * std::polar(1.0, term.frequency(s) * t);
    }
    report.max_imag_p_tilde = std::max(report.max_imag_p_tilde, std::abs(tilde.imag()));
    report.p_tilde.push_back(tilde.real());
    report.p_plus.push_back(report.p_bar + tilde.real());
  }
  if (report.max_imag_p_tilde > 1e-10) {
    std::ostringstream msg;
    msg << "interference term has imaginary part " << report.max_imag_p_tilde;
    fail(ErrorCode::InvariantViolation, msg.str());
  }
  return report;
}

SupremumReport sup_p_plus_cosine(double alpha, int truncation, const SolverOptions& options) {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be positive");
  const EigenPairSet pairs = solve_gauged(cosine_potential(alpha), 0.0, truncation, 1, options);
  const Eigen::VectorXcd f = pairs.eigenvectors.col(0);
  SupremumReport out;
  out.alpha = alpha;
  out.truncation = truncation;
  out.ground_energy = pairs.eigenvalues(0);
  out.f00 = f(truncation).real();
  out.sup_p = 0.5 + std::numbers::pi * std::norm(f(truncation));
  out.direct_sum = kTwoPi * f.tail(truncation + 1).squaredNorm();
  for (int n = 1; n <= truncation; ++n) {
    out.symmetry_residual = std::max(out.symmetry_residual, std::abs(f(truncation - n) - f(truncation + n)));
  }
  return out;
}

double asympt_strong(double alpha) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be positive");
  return 0.5 + std::pow(alpha, -0.25) / (2.0 * std::sqrt(std::numbers::pi));
}

double asympt_weak(double alpha) {
  require(alpha >= 0.0, ErrorCode::InvalidArgument, "alpha must be non-negative");
  return 1.0 - alpha * alpha;
}

double perturbative_f00(double alpha) {
  require(alpha >= 0.0, ErrorCode::InvalidArgument, "alpha must be non-negative");
  return (1.0 - alpha * alpha) / std::sqrt(kTwoPi);
}

double perturbative_g1(double alpha) {
  require(alpha >= 0.0, ErrorCode::InvalidArgument, "alpha must be non-negative");
  return -alpha;
}

double harmonic_f00(double alpha) {
  require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be positive");
  return std::pow(alpha, -0.125) / (std::sqrt(2.0) * std::pow(std::numbers::pi, 0.75));
}

}  // namespace blochwp
