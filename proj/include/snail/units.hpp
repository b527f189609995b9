#pragma once

// Frequencies are stored as ordinary frequencies in GHz and times in ns.
// Angular conversion happens only here.

#include <cmath>
#include <numbers>

namespace snail::units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Phase accumulated by a frequency f (GHz) over t (ns).
constexpr double phase(double f_ghz, double t_ns) { return two_pi * f_ghz * t_ns; }

/// Angular frequency in rad/ns.
constexpr double angular(double f_ghz) { return two_pi * f_ghz; }

constexpr double mhz(double f_ghz) { return 1e3 * f_ghz; }

/// Rate in 1/ns from a time constant in microseconds.
constexpr double rate_per_ns(double t_us) { return 1.0 / (1e3 * t_us); }

/// Wrap an angle to (-pi, pi].
inline double wrap_phase(double x) {
  double y = std::remainder(x, two_pi);
  if (y <= -std::numbers::pi) y += two_pi;
  return y;
}

}  // namespace snail::units
