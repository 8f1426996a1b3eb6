#pragma once

// Unit convention used throughout the library:
//   energies  E/h in MHz (ordinary frequencies, not angular)
//   times     microseconds
//   lengths   micrometres
// A Hamiltonian H (MHz) therefore generates exp(-i 2 pi H t) with t in us,
// while decay rates are plain inverse microseconds.

namespace rydress::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// CODATA 2018
inline constexpr double boltzmann = 1.380649e-23;           // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double gravity = 9.80665;                  // m/s^2

inline constexpr double cesium_mass_amu = 132.905451961;

// Ground-state hyperfine splitting of 133Cs. Never enters the dynamics (all
// evolution happens in the rotating frame); kept for reference output.
inline constexpr double cesium_hyperfine_mhz = 9192.631770;

inline constexpr double dressing_wavelength_nm = 319.0;
inline constexpr double tweezer_wavelength_nm = 938.0;

}  // namespace rydress::constants
