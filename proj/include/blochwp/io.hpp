#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "blochwp/potential.hpp"

namespace blochwp {

inline constexpr std::string_view kToolName = "blochwp";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string hex64(std::uint64_t value);
std::uint64_t fnv1a(std::string_view bytes);

/// Exact coefficient listing {"q": .., "coefficients": [[n, re, im], ...]}.
nlohmann::json potential_to_json(const FourierPotential& potential);
FourierPotential potential_from_json(const nlohmann::json& j);

/// Conventions recorded in every output header.
nlohmann::json conventions_json();

}  // namespace blochwp
