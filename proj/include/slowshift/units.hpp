#pragma once

#include <complex>
#include <numbers>

// Internal unit system: time in microseconds, length in millimetres,
// frequencies quoted in MHz (cyclic) at API boundaries and converted to
// rad/us inside the Bloch and field equations.
namespace slowshift {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Speed of light in mm/us.
inline constexpr double kSpeedOfLight = 299792.458;

inline constexpr double angular(double mhz) { return kTwoPi * mhz; }
inline constexpr double cyclic(double rad_per_us) { return rad_per_us / kTwoPi; }

}  // namespace slowshift
