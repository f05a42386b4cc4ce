#pragma once

namespace casimir::constants {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double kB = 1.380649e-23;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double c = 299792458.0;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double eV = 1.602176634e-19;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double zeta3 = 1.2020569031595942;

}  // namespace casimir::constants
