#pragma once

// CODATA 2018 values, SI units.
namespace dicke::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;    // kg

}  // namespace dicke::constants
