#pragma once

#include <numbers>

namespace tefdtd {

inline constexpr double mu0  = 4.0e-7 * std::numbers::pi;   // H/m
inline constexpr double c0   = 299792458.0;                 // m/s
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);       // F/m, 8.8541878176e-12

} // namespace tefdtd
