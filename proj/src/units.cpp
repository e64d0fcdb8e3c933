#include "qdspin/units.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <map>

namespace qdspin {

namespace {

struct UnitDef {
  Dimension dim;
  double scale;  // multiplier to canonical unit
};

const std::map<std::string, UnitDef>& unit_table() {
  static const std::map<std::string, UnitDef> table = {
      {"Hz", {Dimension::Frequency, 1e-9}},
      {"kHz", {Dimension::Frequency, 1e-6}},
      {"MHz", {Dimension::Frequency, 1e-3}},
      {"GHz", {Dimension::Frequency, 1.0}},
      {"THz", {Dimension::Frequency, 1e3}},
      {"ps", {Dimension::Time, 1e-3}},
      {"ns", {Dimension::Time, 1.0}},
      {"us", {Dimension::Time, 1e3}},
      {"ms", {Dimension::Time, 1e6}},
      {"s", {Dimension::Time, 1e9}},
      {"T", {Dimension::Field, 1.0}},
      {"mT", {Dimension::Field, 1e-3}},
      {"uW", {Dimension::Power, 1e-3}},
      {"mW", {Dimension::Power, 1.0}},
      {"W", {Dimension::Power, 1e3}},
      {"rad", {Dimension::Angle, 1.0}},
      {"deg", {Dimension::Angle, pi / 180.0}},
  };
  return table;
}

// Accepts "pi", "2pi", "pi/2", "-3pi/4" and the like.
std::optional<double> parse_pi_expression(const std::string& s) {
  auto pos = s.find("pi");
  if (pos == std::string::npos) return std::nullopt;
  std::string pre = s.substr(0, pos);
  std::string post = s.substr(pos + 2);
  double num = 1.0;
  if (pre == "-") {
    num = -1.0;
  } else if (!pre.empty()) {
    char* end = nullptr;
    num = std::strtod(pre.c_str(), &end);
    if (end != pre.c_str() + pre.size()) return std::nullopt;
  }
  double den = 1.0;
  if (!post.empty()) {
    if (post[0] != '/') return std::nullopt;
    char* end = nullptr;
    den = std::strtod(post.c_str() + 1, &end);
    if (end != post.c_str() + post.size() || den == 0.0) return std::nullopt;
  }
  return num * pi / den;
}

}  // namespace

std::optional<double> parse_quantity(const std::string& text, Dimension dim) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) return std::nullopt;

  if (dim == Dimension::Angle || dim == Dimension::Scalar) {
    if (auto v = parse_pi_expression(s)) return v;
  }

  char* end = nullptr;
  double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) return std::nullopt;
  std::string suffix(end);

  if (suffix.empty()) {
    // Bare numbers are only legal for dimensionless and angular fields,
    // and for an exact zero, where the unit carries no information.
    if (dim == Dimension::Scalar || dim == Dimension::Angle) return value;
    if (value == 0.0) return 0.0;
    return std::nullopt;
  }
  auto it = unit_table().find(suffix);
  if (it == unit_table().end()) return std::nullopt;
  if (it->second.dim != dim) return std::nullopt;
  return value * it->second.scale;
}

std::string format_frequency_ghz(double f_ghz) {
  char buf[64];
  double a = std::fabs(f_ghz);
  if (a >= 1.0)
    std::snprintf(buf, sizeof(buf), "%.6gGHz", f_ghz);
  else if (a >= 1e-3)
    std::snprintf(buf, sizeof(buf), "%.6gMHz", f_ghz * 1e3);
  else
    std::snprintf(buf, sizeof(buf), "%.6gkHz", f_ghz * 1e6);
  return buf;
}

std::string format_time_ns(double t_ns) {
  char buf[64];
  double a = std::fabs(t_ns);
  if (a >= 1e6)
    std::snprintf(buf, sizeof(buf), "%.6gms", t_ns * 1e-6);
  else if (a >= 1e3)
    std::snprintf(buf, sizeof(buf), "%.6gus", t_ns * 1e-3);
  else
    std::snprintf(buf, sizeof(buf), "%.6gns", t_ns);
  return buf;
}

}  // namespace qdspin
