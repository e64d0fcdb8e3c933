// Unit-suffixed scalar parsing and physical constants.
//
// Canonical internal units: frequency GHz, time ns, field T, power mW,
// angle rad. With these, f[GHz] * t[ns] is a dimensionless cycle count and
// angular frequencies are 2*pi*f in rad/ns.
#pragma once

#include <optional>
#include <string>

namespace qdspin {

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

// Bohr magneton over Planck constant, GHz per tesla.
constexpr double mu_bohr_ghz_per_tesla = 13.996245;

enum class Dimension { Frequency, Time, Field, Power, Angle, Scalar };

// Parses "25GHz", "60ns", "2.9T", "1mW", "pi/2", "0.45" into canonical
// units. Returns nullopt on malformed input or a unit that does not match
// the requested dimension. Dimensioned fields require an explicit unit.
std::optional<double> parse_quantity(const std::string& text, Dimension dim);

// Formats a canonical value back with a reasonable unit, for reports.
std::string format_frequency_ghz(double f_ghz);
std::string format_time_ns(double t_ns);

}  // namespace qdspin
