#pragma once

// CODATA 2018 values, SI units. Every module takes its constants from here
// so derived quantities are reproducible bit-for-bit.

namespace decoq::constants {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double speed_of_light = 2.99792458e8; // m/s
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

}  // namespace decoq::constants
