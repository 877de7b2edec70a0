#include "blochwp/wavepacket.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

#include "blochwp/error.hpp"
#include "blochwp/io.hpp"
#include "blochwp/quadrature.hpp"

namespace blochwp {

namespace {

const double kSqrtTwoPi = std::sqrt(2.0 * std::numbers::pi);

void check_compatible(const BandTable& table, const QuasiMomentumAmplitude& amplitude) {
  require(table.grid == amplitude.grid(), ErrorCode::InvalidArgument,
          "amplitude and band table are sampled on different grids");
  require(amplitude.max_band() <= table.max_band && amplitude.bands().begin()->first >= 0,
          ErrorCode::InvalidArgument,
          "amplitude occupies band " + std::to_string(amplitude.max_band()) + " but the table stops at J_max = " +
              std::to_string(table.max_band));
}

}  // namespace

QuasiMomentumAmplitude::QuasiMomentumAmplitude(BrillouinGrid grid, std::map<int, Eigen::VectorXcd> bands)
    : grid_(std::move(grid)), bands_(std::move(bands)) {
  require(!bands_.empty(), ErrorCode::InvalidArgument, "amplitude has no bands");
  for (const auto& [j, samples] : bands_) {
    require(j >= 0, ErrorCode::InvalidArgument, "band index must be non-negative");
    require(samples.size() == grid_.count(), ErrorCode::InvalidArgument,
            "amplitude for band " + std::to_string(j) + " has the wrong number of samples");
    require(samples.allFinite(), ErrorCode::InvalidArgument, "amplitude contains non-finite samples");
    require(samples(0) == 0.0 && samples(samples.size() - 1) == 0.0, ErrorCode::SupportViolation,
            "amplitude of band " + std::to_string(j) + " does not vanish at the zone margin");
  }
}

const Eigen::VectorXcd& QuasiMomentumAmplitude::band(int j) const {
  const auto it = bands_.find(j);
  require(it != bands_.end(), ErrorCode::InvalidArgument, "amplitude has no band " + std::to_string(j));
  return it->second;
}

std::pair<Eigen::Index, Eigen::Index> QuasiMomentumAmplitude::support(int j) const {
  const Eigen::VectorXcd& samples = band(j);
  Eigen::Index first = 0;
  Eigen::Index last = samples.size() - 1;
  while (first < samples.size() && samples(first) == 0.0) ++first;
  while (last > first && samples(last) == 0.0) --last;
  return {first, last};
}

double QuasiMomentumAmplitude::norm() const {
  const Eigen::VectorXd w = simpson_weights(grid_.count(), grid_.spacing());
  double total = 0.0;
  for (const auto& [j, samples] : bands_) total += w.dot(samples.cwiseAbs2());
  return total;
}

QuasiMomentumAmplitude QuasiMomentumAmplitude::normalized() const {
  const double n = norm();
  require(n > 0.0, ErrorCode::InvalidArgument, "cannot normalize a zero amplitude");
  return scaled(1.0 / std::sqrt(n));
}

QuasiMomentumAmplitude QuasiMomentumAmplitude::scaled(std::complex<double> factor) const {
  std::map<int, Eigen::VectorXcd> out;
  for (const auto& [j, samples] : bands_) out.emplace(j, samples * factor);
  return QuasiMomentumAmplitude(grid_, std::move(out));
}

QuasiMomentumAmplitude operator+(const QuasiMomentumAmplitude& a, const QuasiMomentumAmplitude& b) {
  require(a.grid_ == b.grid_, ErrorCode::InvalidArgument, "cannot add amplitudes on different grids");
  std::map<int, Eigen::VectorXcd> out = a.bands_;
  for (const auto& [j, samples] : b.bands_) {
    auto [it, inserted] = out.emplace(j, samples);
    if (!inserted) it->second += samples;
  }
  return QuasiMomentumAmplitude(a.grid_, std::move(out));
}

QuasiMomentumAmplitude make_bump(const BrillouinGrid& grid, int band, double center, double halfwidth) {
  require(halfwidth > 0.0 && std::isfinite(halfwidth) && std::isfinite(center), ErrorCode::InvalidArgument,
          "bump half-width must be positive");
  const double edge = 0.5 - grid.margin();
  if (!(center - halfwidth > -edge && center + halfwidth < edge)) {
    std::ostringstream msg;
    msg << "bump support [" << center - halfwidth << ", " << center + halfwidth << "] is not inside (" << -edge
        << ", " << edge << ")";
    fail(ErrorCode::SupportViolation, msg.str());
  }
  Eigen::VectorXcd samples = Eigen::VectorXcd::Zero(grid.count());
  for (Eigen::Index i = 0; i < grid.count(); ++i) {
    const double u = (grid[i] - center) / halfwidth;
    if (std::abs(u) < 1.0) samples(i) = std::exp(-1.0 / (1.0 - u * u));
  }
  require(samples.cwiseAbs().maxCoeff() > 0.0, ErrorCode::SupportViolation,
          "bump is narrower than the grid spacing");
  return QuasiMomentumAmplitude(grid, {{band, samples}}).normalized();
}

QuasiMomentumAmplitude read_amplitude_csv(std::istream& in, const BrillouinGrid& grid) {
  std::map<int, Eigen::VectorXcd> bands;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.find_first_of("zZ") == 0) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      fields.push_back(rest.substr(0, pos));
    }
    fields.push_back(rest);
    require(fields.size() == 4, ErrorCode::ConfigError,
            "amplitude CSV line " + std::to_string(line_no) + " must have columns z,j,re,im");
    const double z = parse_double(fields[0]);
    const int j = static_cast<int>(parse_double(fields[1]));
    const double s = (z - grid[0]) / grid.spacing();
    const auto i = static_cast<Eigen::Index>(std::llround(s));
    require(i >= 0 && i < grid.count() && std::abs(grid[i] - z) <= 1e-9 * grid.spacing(), ErrorCode::ConfigError,
            "amplitude CSV line " + std::to_string(line_no) + ": z is not a grid sample");
    auto [it, inserted] = bands.try_emplace(j, Eigen::VectorXcd::Zero(grid.count()));
    it->second(i) = {parse_double(fields[2]), parse_double(fields[3])};
  }
  return QuasiMomentumAmplitude(grid, std::move(bands));
}

int folding_index(double k) { return static_cast<int>(std::round(k)); }

std::complex<double> momentum_wavefunction_band(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                                int band, double k, double t) {
  check_compatible(table, amplitude);
  const int n = folding_index(k);
  const double z = k - n;
  const double edge = 0.5 - table.grid.margin();
  if (std::abs(z) > edge) {
    std::ostringstream msg;
    msg << "momentum k = " << k << " lies within the zone margin of a folding seam";
    fail(ErrorCode::FoldingSeam, msg.str());
  }
  if (n < -table.truncation || n > table.truncation) return 0.0;
  const double z0 = table.grid[0];
  const double h = table.grid.spacing();
  const std::complex<double> phi = cubic_interpolate(amplitude.band(band), z0, h, z);
  if (phi == 0.0) return 0.0;
  const auto& f = table.coefficients[static_cast<std::size_t>(band)];
  const std::complex<double> fn = cubic_interpolate(f.row(n + table.truncation).transpose(), z0, h, z);
  const double energy = cubic_interpolate(table.energies.row(band).transpose(), z0, h, z);
  return kSqrtTwoPi * phi * fn * std::polar(1.0, -energy * t);
}

std::complex<double> momentum_wavefunction(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double k,
                                           double t) {
  std::complex<double> sum = 0.0;
  for (const auto& [j, samples] : amplitude.bands()) sum += momentum_wavefunction_band(table, amplitude, j, k, t);
  return sum;
}

MomentumDistribution momentum_distribution(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                           std::span<const double> k_values, double t) {
  MomentumDistribution out;
  out.time = t;
  const auto count = static_cast<Eigen::Index>(k_values.size());
  out.k_values = Eigen::Map<const Eigen::VectorXd>(k_values.data(), count);
  out.density.resize(count);
  out.folding.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    out.density(i) = std::norm(momentum_wavefunction(table, amplitude, out.k_values(i), t));
    out.folding(i) = folding_index(out.k_values(i));
  }
  return out;
}

double momentum_norm(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double t) {
  check_compatible(table, amplitude);
  const Eigen::VectorXd w = simpson_weights(table.grid.count(), table.grid.spacing());
  double total = 0.0;
  for (int n = -table.truncation; n <= table.truncation; ++n) {
    Eigen::VectorXcd slice = Eigen::VectorXcd::Zero(table.grid.count());
    for (const auto& [j, phi] : amplitude.bands()) {
      const auto& f = table.coefficients[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < slice.size(); ++i) {
        if (phi(i) == 0.0) continue;
        slice(i) += kSqrtTwoPi * phi(i) * f(n + table.truncation, i) * std::polar(1.0, -table.energies(j, i) * t);
      }
    }
    total += w.dot(slice.cwiseAbs2());
  }
  return total;
}

namespace {

// out[s] = exp(i (start + s step)), by recurrence re-anchored every 32 terms
void fill_phases(std::complex<double>* out, Eigen::Index count, double start, double step) {
  constexpr Eigen::Index kAnchor = 32;
  const std::complex<double> ratio = std::polar(1.0, step);
  for (Eigen::Index s = 0; s < count; ++s) {
    out[s] = s % kAnchor == 0 ? std::polar(1.0, start + double(s) * step) : out[s - 1] * ratio;
  }
}

}  // namespace

Eigen::VectorXcd position_wavefunction(const BandTable& table, const QuasiMomentumAmplitude& amplitude,
                                       std::span<const double> x_values, double t) {
  check_compatible(table, amplitude);
  const auto nx = static_cast<Eigen::Index>(x_values.size());
  const Eigen::VectorXd w = simpson_weights(table.grid.count(), table.grid.spacing());
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(nx);

  for (const auto& [j, phi] : amplitude.bands()) {
    const auto [first, last] = amplitude.support(j);
    const Eigen::Index ns = last - first + 1;
    const auto& f = table.coefficients[static_cast<std::size_t>(j)];

    // harmonics whose coefficients are below 1e-17 of the peak over the
    // support cannot change Psi at double precision
    const Eigen::VectorXd peak = f.middleCols(first, ns).cwiseAbs().rowwise().maxCoeff();
    const double cutoff = 1e-17 * peak.maxCoeff();
    Eigen::Index lo = 0, hi = peak.size() - 1;
    while (lo < hi && peak(lo) <= cutoff) ++lo;
    while (hi > lo && peak(hi) <= cutoff) --hi;
    const Eigen::Index nn = hi - lo + 1;

    Eigen::VectorXcd weighted(ns);
    for (Eigen::Index s = 0; s < ns; ++s) {
      const Eigen::Index i = first + s;
      weighted(s) = w(i) * phi(i) * std::polar(1.0, -table.energies(j, i) * t);
    }
    const Eigen::MatrixXcd a = f.block(lo, first, nn, ns) * weighted.asDiagonal();
    const Eigen::VectorXd z = table.grid.values().segment(first, ns);

    const double dz = table.grid.spacing();
    constexpr Eigen::Index kBlock = 256;
    Eigen::MatrixXcd plane(ns, kBlock);
    for (Eigen::Index start = 0; start < nx; start += kBlock) {
      const Eigen::Index b = std::min(kBlock, nx - start);
      for (Eigen::Index c = 0; c < b; ++c) {
        const double x = x_values[static_cast<std::size_t>(start + c)];
        fill_phases(plane.col(c).data(), ns, z(0) * x, dz * x);
      }
      const Eigen::MatrixXcd partial = a * plane.leftCols(b);
      Eigen::VectorXcd harmonic(nn);
      for (Eigen::Index c = 0; c < b; ++c) {
        const double x = x_values[static_cast<std::size_t>(start + c)];
        fill_phases(harmonic.data(), nn, double(lo - table.truncation) * x, x);
        psi(start + c) += harmonic.cwiseProduct(partial.col(c)).sum();
      }
    }
  }
  return psi;
}

std::complex<double> position_wavefunction(const BandTable& table, const QuasiMomentumAmplitude& amplitude, double x,
                                           double t) {
  const double xs[] = {x};
  return position_wavefunction(table, amplitude, xs, t)(0);
}

}  // namespace blochwp
