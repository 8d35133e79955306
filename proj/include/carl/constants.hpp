#pragma once

namespace carl {

// CODATA 2018 values, SI units.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double two_pi = 6.283185307179586476925286766559;
}  // namespace constants

// Laboratory defaults for the 87Rb ring-cavity setup.
namespace defaults {
inline constexpr double d1_wavelength = 794.8e-9;          // m
inline constexpr double atomic_linewidth = constants::two_pi * 6.0e6;  // rad/s
inline constexpr double cavity_length = 0.085;             // m
inline constexpr double waist = 107e-6;                    // m
inline constexpr double decay_time = 3.8e-6;               // s (high finesse)
inline constexpr double atom_mass = 1.4432e-25;            // kg, 87Rb
inline constexpr double coupling_g = constants::two_pi * 84e3;  // rad/s
inline constexpr double backscatter_ratio = 1.8e-4;
inline constexpr double pump_buildup_time = 20e-6;         // s
}  // namespace defaults

}  // namespace carl
