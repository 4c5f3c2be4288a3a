#pragma once

// Unit system used throughout the library:
//   time ns, length um, angular frequency rad/ns, velocity m/s at the
//   interface (converted to um/ns internally).

#include <numbers>
#include <stdexcept>
#include <string>

namespace rydberg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kRb87Mass = 1.443160648e-25;    // kg
inline constexpr double kCelsiusOffset = 273.15;

/// Cyclic frequency in MHz to angular frequency in rad/ns.
constexpr double mhz_to_rad_per_ns(double f_mhz) { return kTwoPi * f_mhz * 1e-3; }
constexpr double rad_per_ns_to_mhz(double w) { return w / (kTwoPi * 1e-3); }

/// 1 m/s = 1e-3 um/ns.
constexpr double mps_to_um_per_ns(double v) { return v * 1e-3; }

constexpr double wavenumber(double wavelength_um) { return kTwoPi / wavelength_um; }

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rydberg
