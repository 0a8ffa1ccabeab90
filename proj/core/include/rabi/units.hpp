#pragma once

#include <numbers>

namespace rabi {

// Internally every frequency is angular (rad/ms) and every time is in ms.
// Configuration and output use ordinary frequencies in kHz: nu = omega / 2pi.

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Zeeman shift of the |2,2> <-> |2,1> transition per unit field: 10 mG = 7 kHz.
inline constexpr double kGyromagneticKhzPerMilliGauss = 0.7;

constexpr double khz_to_angular(double khz) noexcept { return kTwoPi * khz; }
constexpr double angular_to_khz(double rad_per_ms) noexcept { return rad_per_ms / kTwoPi; }

constexpr double milligauss_to_khz(double mg) noexcept { return kGyromagneticKhzPerMilliGauss * mg; }
constexpr double khz_to_milligauss(double khz) noexcept { return khz / kGyromagneticKhzPerMilliGauss; }

}  // namespace rabi
