#pragma once

#include <numbers>

namespace jjspd {

// Exact SI values (2019 redefinition).
namespace constants {
inline constexpr double hbar = 1.054571817e-34;         // J s
inline constexpr double planck = 6.62607015e-34;        // J s
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double boltzmann = 1.380649e-23;       // J / K
inline constexpr double speed_of_light = 299792458.0;   // m / s
inline constexpr double pi = std::numbers::pi;
}  // namespace constants

// Scale factors from human units to SI. Multiply to convert in, divide to
// convert out:  12.0 * units::uA  ->  1.2e-5 A.
namespace units {
inline constexpr double nm = 1e-9;
inline constexpr double um = 1e-6;
inline constexpr double mm = 1e-3;
inline constexpr double cm = 1e-2;
inline constexpr double uA = 1e-6;
inline constexpr double nA = 1e-9;
inline constexpr double fF = 1e-15;
inline constexpr double ns = 1e-9;
inline constexpr double us = 1e-6;
inline constexpr double ms = 1e-3;
inline constexpr double pW = 1e-12;
inline constexpr double uW = 1e-6;
inline constexpr double fJ = 1e-15;
inline constexpr double GHz = 1e9;
inline constexpr double eV = constants::elementary_charge;
inline constexpr double meV = 1e-3 * constants::elementary_charge;
inline constexpr double ueV = 1e-6 * constants::elementary_charge;
inline constexpr double per_cm2 = 1e4;       // cm^-2 -> m^-2
inline constexpr double cm2_per_Vs = 1e-4;   // cm^2/(V s) -> m^2/(V s)
inline constexpr double cm2_per_s = 1e-4;    // cm^2/s -> m^2/s
}  // namespace units

}  // namespace jjspd
