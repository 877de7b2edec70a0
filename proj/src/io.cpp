#include "blochwp/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>

#include "blochwp/error.hpp"

namespace blochwp {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  require(ec == std::errc(), ErrorCode::InvalidArgument, "cannot format double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  require(ec == std::errc() && end == text.data() + text.size(), ErrorCode::InvalidArgument,
          "malformed number '" + std::string(text) + "'");
  return value;
}

std::string hex64(std::uint64_t value) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf.data(), 16);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

nlohmann::json potential_to_json(const FourierPotential& potential) {
  nlohmann::json coefficients = nlohmann::json::array();
  for (const auto& [n, value] : potential.coefficients()) {
    coefficients.push_back({n, value.real(), value.imag()});
  }
  return {{"q", potential.q()}, {"coefficients", coefficients}};
}

FourierPotential potential_from_json(const nlohmann::json& j) {
  FourierPotential::Coefficients map;
  for (const auto& entry : j.at("coefficients")) {
    map[entry.at(0).get<int>()] = Complex(entry.at(1).get<double>(), entry.at(2).get<double>());
  }
  return FourierPotential(j.at("q").get<double>(), std::move(map));
}

nlohmann::json conventions_json() {
  return {
      {"units", "hbar = mu = q = 1; energies in hbar^2 q^2 / (2 mu); time in 2 mu / (hbar q^2)"},
      {"theta_at_zero", "right limit: the z = 0 sample reports Lambda(0+)"},
      {"gauge", "largest-modulus f_n real positive, ties to smallest n"},
      {"eigenvector_norm", "sum_n |f_n|^2 = 1/(2 pi)"},
  };
}

}  // namespace blochwp
