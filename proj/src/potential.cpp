#include "blochwp/potential.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "blochwp/error.hpp"

namespace blochwp {

namespace {

constexpr double kSymmetryTolerance = 1e-14;

void fnv_mix(std::uint64_t& hash, std::uint64_t word) {
  for (int byte = 0; byte < 8; ++byte) {
    hash ^= (word >> (8 * byte)) & 0xffu;
    hash *= 0x100000001b3ull;
  }
}

}  // namespace

FourierPotential::FourierPotential(double q, Coefficients coefficients) : q_(q) {
  require(std::isfinite(q) && q > 0.0, ErrorCode::InvalidArgument, "reciprocal period q must be positive");
  for (const auto& [n, value] : coefficients) {
    require(std::isfinite(value.real()) && std::isfinite(value.imag()), ErrorCode::InvalidArgument,
            "non-finite Fourier coefficient");
    if (value != Complex(0.0, 0.0)) coefficients_.emplace(n, value);
  }

  const double scale = std::max(1.0, max_abs_coefficient());
  for (const auto& [n, value] : coefficients_) {
    const Complex mirror = coefficient(-n);
    if (std::abs(mirror - std::conj(value)) > kSymmetryTolerance * scale) {
      std::ostringstream msg;
      msg << "coefficients violate V_{-n} = conj(V_n) at n = " << n;
      fail(ErrorCode::InvalidArgument, msg.str());
    }
    order_ = std::max(order_, std::abs(n));
  }
}

FourierPotential FourierPotential::from_harmonics(double q, double v0, const std::vector<Harmonic>& harmonics) {
  Coefficients map;
  if (v0 != 0.0) map[0] = Complex(v0, 0.0);
  for (const auto& h : harmonics) {
    require(h.n > 0, ErrorCode::InvalidArgument, "harmonic index must be positive");
    require(!map.contains(h.n), ErrorCode::InvalidArgument, "duplicate harmonic n = " + std::to_string(h.n));
    map[h.n] = Complex(h.re, h.im);
    map[-h.n] = Complex(h.re, -h.im);
  }
  return FourierPotential(q, std::move(map));
}

FourierPotential FourierPotential::free(double q) { return FourierPotential(q, {}); }

double FourierPotential::period() const noexcept { return 2.0 * std::numbers::pi / q_; }

Complex FourierPotential::coefficient(int n) const {
  const auto it = coefficients_.find(n);
  return it == coefficients_.end() ? Complex(0.0, 0.0) : it->second;
}

double FourierPotential::max_abs_coefficient() const noexcept {
  double m = 0.0;
  for (const auto& [n, value] : coefficients_) m = std::max(m, std::abs(value));
  return m;
}

bool FourierPotential::is_real_symmetric() const noexcept {
  return std::all_of(coefficients_.begin(), coefficients_.end(),
                     [](const auto& entry) { return entry.second.imag() == 0.0; });
}

FourierPotential FourierPotential::rescaled(double factor, double q) const {
  Coefficients map;
  for (const auto& [n, value] : coefficients_) map[n] = value * factor;
  return FourierPotential(q, std::move(map));
}

std::uint64_t FourierPotential::fingerprint() const noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  fnv_mix(hash, std::bit_cast<std::uint64_t>(q_));
  for (const auto& [n, value] : coefficients_) {
    fnv_mix(hash, static_cast<std::uint64_t>(static_cast<std::int64_t>(n)));
    fnv_mix(hash, std::bit_cast<std::uint64_t>(value.real()));
    fnv_mix(hash, std::bit_cast<std::uint64_t>(value.imag()));
  }
  return hash;
}

FourierPotential make_cosine(double amplitude, double q) {
  require(std::isfinite(amplitude) && amplitude > 0.0, ErrorCode::InvalidArgument, "cosine amplitude must be positive");
  require(std::isfinite(q) && q > 0.0, ErrorCode::InvalidArgument, "reciprocal period q must be positive");
  return FourierPotential(q, {{-1, Complex(amplitude / 2.0, 0.0)}, {1, Complex(amplitude / 2.0, 0.0)}});
}

FourierPotential cosine_potential(double alpha) { return make_cosine(2.0 * alpha, 1.0); }

double evaluate(const FourierPotential& potential, double x) {
  Complex sum(0.0, 0.0);
  for (const auto& [n, value] : potential.coefficients()) {
    sum += value * std::polar(1.0, n * potential.q() * x);
  }
  // imaginary residue is rounding only: the map is Hermitian by construction
  return sum.real();
}

double dimensionless_strength(double amplitude, double mu, double hbar, double q) {
  for (double v : {amplitude, mu, hbar, q}) {
    require(std::isfinite(v) && v > 0.0, ErrorCode::InvalidArgument, "dimensionless_strength arguments must be positive");
  }
  return mu * amplitude / (hbar * hbar * q * q);
}

FourierPotential to_dimensionless(const FourierPotential& potential, double mu, double hbar) {
  require(std::isfinite(mu) && mu > 0.0 && std::isfinite(hbar) && hbar > 0.0, ErrorCode::InvalidArgument,
          "mass and hbar must be positive");
  const double q = potential.q();
  return potential.rescaled(2.0 * mu / (hbar * hbar * q * q), 1.0);
}

}  // namespace blochwp
