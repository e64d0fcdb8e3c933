#include "qdspin/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "qdspin/units.hpp"

namespace qdspin {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

struct Field {
  enum Kind { Quantity, Scalar, Integer, Flag, Enum } kind;
  Dimension dim = Dimension::Scalar;
  std::function<void(World&, double)> set_num;
  std::function<void(World&, const std::string&)> set_str;
};

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> s = [] {
    std::map<std::string, Field> m;
    auto q = [&m](const std::string& path, Dimension dim,
                  std::function<void(World&, double)> set) {
      m[path] = Field{Field::Quantity, dim, std::move(set), nullptr};
    };
    auto num = [&m](const std::string& path, std::function<void(World&, double)> set) {
      m[path] = Field{Field::Scalar, Dimension::Scalar, std::move(set), nullptr};
    };
    auto flag = [&m](const std::string& path, std::function<void(World&, double)> set) {
      m[path] = Field{Field::Flag, Dimension::Scalar, std::move(set), nullptr};
    };

    num("cavity.finesse", [](World& w, double v) { w.cavity.finesse = v; });
    q("cavity.linewidth", Dimension::Frequency,
      [](World& w, double v) { w.cavity.linewidth_ghz = v; });
    q("cavity.mode_splitting", Dimension::Frequency,
      [](World& w, double v) { w.cavity.mode_splitting_ghz = v; });
    num("cavity.mirror_r1", [](World& w, double v) { w.cavity.mirror_r1 = v; });
    num("cavity.mirror_r2", [](World& w, double v) { w.cavity.mirror_r2 = v; });
    q("cavity.resonance", Dimension::Frequency,
      [](World& w, double v) { w.cavity.resonance_thz = v * 1e-3; });

    q("spin.zeeman", Dimension::Frequency,
      [](World& w, double v) { w.spin.zeeman_ghz = v; });
    num("spin.g_factor", [](World& w, double v) { w.spin.g_factor = v; });
    q("spin.field", Dimension::Field,
      [](World& w, double v) { w.spin.b_field_tesla = v; });
    q("spin.trion_zeeman", Dimension::Frequency,
      [](World& w, double v) { w.spin.trion_zeeman_ghz = v; });
    q("spin.gamma_x", Dimension::Frequency,
      [](World& w, double v) { w.spin.gamma_x_per_ns = v; });
    q("spin.gamma_y", Dimension::Frequency,
      [](World& w, double v) { w.spin.gamma_y_per_ns = v; });
    q("spin.t1", Dimension::Time, [](World& w, double v) { w.spin.t1_us = v * 1e-3; });
    num("spin.flip_coefficient",
        [](World& w, double v) { w.spin.flip_coefficient = v; });

    q("raman.detuning", Dimension::Frequency,
      [](World& w, double v) { w.raman.detuning_ghz = v; });
    q("raman.power", Dimension::Power,
      [](World& w, double v) { w.raman.power_mw = v; });
    q("raman.delta", Dimension::Frequency,
      [](World& w, double v) { w.drive_delta_ghz = v; });
    q("raman.mw_phase", Dimension::Angle,
      [](World& w, double v) { w.raman.mw_phase_rad = v; });
    q("raman.calibration_rabi", Dimension::Frequency, nullptr);
    q("raman.calibration_detuning", Dimension::Frequency, nullptr);
    q("raman.calibration_power", Dimension::Power, nullptr);

    q("bath.t2_star", Dimension::Time,
      [](World& w, double v) { w.bath.sigma_ghz = sigma_from_t2_star_ghz(v); });
    q("bath.sigma", Dimension::Frequency,
      [](World& w, double v) { w.bath.sigma_ghz = v; });
    q("bath.mean", Dimension::Frequency,
      [](World& w, double v) { w.bath.mean_ghz = v; });
    q("bath.set_point", Dimension::Frequency,
      [](World& w, double v) { w.bath.set_point_ghz = v; });
    num("bath.species.in115", [](World& w, double v) { w.species[0].abundance_weight = v; });
    num("bath.species.as75", [](World& w, double v) { w.species[1].abundance_weight = v; });
    num("bath.species.ga69", [](World& w, double v) { w.species[2].abundance_weight = v; });
    num("bath.species.ga71", [](World& w, double v) { w.species[3].abundance_weight = v; });

    flag("hh_channel.enabled", [](World& w, double v) { w.hh_channel.enabled = v != 0; });
    q("hh_channel.peak_rate", Dimension::Frequency,
      [](World& w, double v) { w.hh_channel.peak_rate_per_ns = v; });
    q("hh_channel.width", Dimension::Frequency,
      [](World& w, double v) { w.hh_channel.width_ghz = v; });

    m["protocol.mode"] = Field{Field::Enum, Dimension::Scalar, nullptr,
                               [](World& w, const std::string& v) {
                                 if (v == "quantum_sensing")
                                   w.protocol.mode = CoolingMode::QuantumSensing;
                                 else if (v == "rabi_drive")
                                   w.protocol.mode = CoolingMode::RabiDrive;
                                 else
                                   throw ConfigError(
                                       "protocol.mode must be quantum_sensing or "
                                       "rabi_drive");
                               }};
    num("protocol.cycles", [](World& w, double v) { w.protocol.n_cycles = int(v); });
    q("protocol.tau_min", Dimension::Time,
      [](World& w, double v) { w.protocol.tau_min_ns = v; });
    q("protocol.tau_max", Dimension::Time,
      [](World& w, double v) { w.protocol.tau_max_ns = v; });
    q("protocol.drive_duration", Dimension::Time,
      [](World& w, double v) { w.protocol.drive_duration_ns = v; });
    q("protocol.drive_omega", Dimension::Frequency,
      [](World& w, double v) { w.protocol.drive_omega_ghz = v; });
    q("protocol.readout", Dimension::Time,
      [](World& w, double v) { w.protocol.readout_ns = v; });
    num("protocol.flip_efficiency",
        [](World& w, double v) { w.protocol.flip_efficiency = v; });
    q("protocol.flip_step", Dimension::Frequency,
      [](World& w, double v) { w.protocol.flip_step_ghz = v; });
    num("protocol.repetitions",
        [](World& w, double v) { w.protocol.repetitions = int(v); });

    num("noise.beta", [](World& w, double v) { w.noise.beta = v; });
    q("noise.low_cutoff", Dimension::Frequency,
      [](World& w, double v) { w.noise.low_cutoff_ghz = v; });
    q("noise.high_cutoff", Dimension::Frequency,
      [](World& w, double v) { w.noise.high_cutoff_ghz = v; });
    q("noise.hahn_t2", Dimension::Time, nullptr);  // applied after the shape is set
    num("noise.amplitude", [](World& w, double v) { w.noise.amplitude = v; });

    q("readout.pump_rabi", Dimension::Frequency,
      [](World& w, double v) { w.readout.pump_rabi_ghz = v; });
    q("readout.duration", Dimension::Time,
      [](World& w, double v) { w.readout.readout_duration_ns = v; });
    num("readout.detection_scale",
        [](World& w, double v) { w.readout.detection_scale = v; });
    num("readout.rho11_initial",
        [](World& w, double v) { w.readout.rho11_initial = v; });
    num("readout.theta", [](World& w, double v) { w.readout.theta = v; });
    flag("readout.lower_bound_mode",
         [](World& w, double v) { w.readout.lower_bound_mode = v != 0; });

    num("engine.shots", [](World& w, double v) { w.default_shots = int(v); });
    flag("engine.bath", [](World& w, double v) { w.bath_enabled = v != 0; });
    flag("engine.flips", [](World& w, double v) { w.flips_enabled = v != 0; });
    flag("engine.t1", [](World& w, double v) { w.t1_enabled = v != 0; });
    flag("engine.hh_damping",
         [](World& w, double v) { w.hh_damping_enabled = v != 0; });
    flag("engine.non_rwa", [](World& w, double v) { w.non_rwa = v != 0; });
    flag("engine.poisson", [](World& w, double v) { w.poisson_counts = v != 0; });
    num("engine.init_infidelity",
        [](World& w, double v) { w.init_infidelity = v; });
    q("engine.rabi_trace", Dimension::Time,
      [](World& w, double v) { w.rabi_trace_ns = v; });
    return m;
  }();
  return s;
}

double parse_field_value(const std::string& path, const Field& f,
                         const std::string& raw) {
  const Dimension dim = f.kind == Field::Quantity ? f.dim : Dimension::Scalar;
  auto v = parse_quantity(raw, dim);
  if (!v)
    throw ConfigError(path + ": cannot parse '" + raw + "'" +
                      (f.kind == Field::Quantity ? " (unit required)" : ""));
  return *v;
}

}  // namespace

ConfigTree parse_config_text(const std::string& text) {
  ConfigTree tree;
  std::istringstream stream(text);
  std::string line;
  std::vector<std::string> blocks;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s == "}") {
      if (blocks.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": unmatched '}'");
      blocks.pop_back();
      continue;
    }
    if (s.back() == '{') {
      std::string name = trim(s.substr(0, s.size() - 1));
      if (name.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": unnamed block");
      blocks.push_back(name);
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    std::string path;
    for (const auto& b : blocks) path += b + ".";
    path += key;
    tree[path] = value;
  }
  if (!blocks.empty()) throw ConfigError("unterminated block '" + blocks.back() + "'");
  return tree;
}

ConfigTree parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(ConfigTree& tree, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects path=value, got '" + assignment + "'");
  tree[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

World world_from_config(const ConfigTree& tree) {
  World w = default_world();
  const auto& s = schema();
  for (const auto& [path, raw] : tree) {
    auto it = s.find(path);
    if (it == s.end()) throw ConfigError("unknown config key '" + path + "'");
    const Field& f = it->second;
    if (f.kind == Field::Enum) {
      f.set_str(w, raw);
      continue;
    }
    const double v = parse_field_value(path, f, raw);
    if (f.set_num) f.set_num(w, v);
  }
  // Raman calibration point: resolve after the cavity block is final.
  auto get = [&](const char* key) -> double {
    auto it = tree.find(key);
    if (it == tree.end()) return -1.0;
    return parse_field_value(key, s.at(key), it->second);
  };
  const double cal_rabi = get("raman.calibration_rabi");
  if (cal_rabi > 0.0) {
    const double cal_det = get("raman.calibration_detuning");
    const double cal_pow = get("raman.calibration_power");
    w.raman.calibration_ghz_per_sqrt_mw = calibrate_raman_coupling(
        cal_rabi, cal_det > 0 ? cal_det : w.raman.detuning_ghz,
        cal_pow > 0 ? cal_pow : w.raman.power_mw, w.cavity);
  }
  const double hahn_t2 = get("noise.hahn_t2");
  if (hahn_t2 > 0.0) {
    w.noise.kind = SpectrumKind::PowerLaw;
    w.noise.amplitude = calibrate_amplitude_for_hahn(w.noise, hahn_t2);
  }
  return w;
}

std::vector<Violation> validate_config(const ConfigTree& tree) {
  std::vector<Violation> out;
  World w;
  try {
    w = world_from_config(tree);
  } catch (const std::exception& e) {
    out.push_back({"config", e.what(), false});
    return out;
  }
  auto check = [&](const char* path, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      out.push_back({path, e.what(), false});
    }
  };
  check("cavity", [&] { w.cavity.validate(); });
  check("spin", [&] { w.spin.validate(); });
  check("bath", [&] { w.bath.validate(); });
  check("protocol", [&] { w.protocol.validate(); });
  check("noise", [&] { w.noise.validate(); });
  check("readout", [&] { w.readout.validate(); });

  if (w.spin.flip_coefficient < 0.5e-4 || w.spin.flip_coefficient > 1.2e-4)
    out.push_back({"spin.flip_coefficient",
                   "outside the measured 0.5-1.2e-4 per-MHz band", true});
  for (const auto& sp : w.species) {
    if (sp.abundance_weight <= 0.0) continue;
    const double wn = sp.larmor_ghz(w.spin.b_field_tesla) * 1e3;  // MHz
    if (wn < 20.0 || wn > 50.0)
      out.push_back({"bath.species." + sp.name,
                     "Larmor frequency outside the expected 20-50 MHz band", true});
  }
  try {
    const double omega = spin_rabi_frequency_ghz(w.raman, w.cavity);
    if (w.raman.detuning_ghz < 10.0 * omega)
      out.push_back({"raman.detuning",
                     "detuning below 10x the spin Rabi frequency, adiabatic "
                     "elimination is marginal",
                     true});
  } catch (const std::exception& e) {
    out.push_back({"raman", e.what(), false});
  }
  return out;
}

std::string config_hash(const ConfigTree& tree) {
  // Canonical serialization of the *parsed* world; unit spelling and key
  // order cannot change it.
  const World w = world_from_config(tree);
  char buf[64];
  std::string canon;
  auto add = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g;", v);
    canon += buf;
  };
  add(w.cavity.finesse);
  add(w.cavity.linewidth_ghz);
  add(w.cavity.mode_splitting_ghz);
  add(w.cavity.mirror_r1);
  add(w.cavity.mirror_r2);
  add(w.cavity.resonance_thz);
  add(w.spin.zeeman_ghz);
  add(w.spin.g_factor);
  add(w.spin.b_field_tesla);
  add(w.spin.trion_zeeman_ghz);
  add(w.spin.gamma_x_per_ns);
  add(w.spin.gamma_y_per_ns);
  add(w.spin.t1_us);
  add(w.spin.flip_coefficient);
  add(w.raman.detuning_ghz);
  add(w.raman.power_mw);
  add(w.raman.calibration_ghz_per_sqrt_mw);
  add(w.raman.mw_phase_rad);
  add(w.bath.mean_ghz);
  add(w.bath.sigma_ghz);
  add(w.bath.set_point_ghz);
  for (const auto& sp : w.species) add(sp.abundance_weight);
  add(w.hh_channel.enabled ? 1.0 : 0.0);
  add(w.hh_channel.peak_rate_per_ns);
  add(w.hh_channel.width_ghz);
  add(w.protocol.mode == CoolingMode::QuantumSensing ? 1.0 : 0.0);
  add(double(w.protocol.n_cycles));
  add(w.protocol.tau_min_ns);
  add(w.protocol.tau_max_ns);
  add(w.protocol.drive_duration_ns);
  add(w.protocol.drive_omega_ghz);
  add(w.protocol.readout_ns);
  add(w.protocol.flip_efficiency);
  add(w.protocol.flip_step_ghz);
  add(double(w.protocol.repetitions));
  add(w.noise.amplitude);
  add(w.noise.beta);
  add(w.noise.low_cutoff_ghz);
  add(w.noise.high_cutoff_ghz);
  add(w.readout.pump_rabi_ghz);
  add(w.readout.readout_duration_ns);
  add(w.readout.detection_scale);
  add(w.readout.rho11_initial);
  add(w.readout.theta);
  add(w.readout.lower_bound_mode ? 1.0 : 0.0);
  add(double(w.default_shots));
  add(w.bath_enabled ? 1.0 : 0.0);
  add(w.flips_enabled ? 1.0 : 0.0);
  add(w.t1_enabled ? 1.0 : 0.0);
  add(w.hh_damping_enabled ? 1.0 : 0.0);
  add(w.non_rwa ? 1.0 : 0.0);
  add(w.poisson_counts ? 1.0 : 0.0);
  add(w.init_infidelity);
  add(w.drive_delta_ghz);
  add(w.rabi_trace_ns);

  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string default_config_text() {
  return R"(# qdspin default parameter set
cavity {
  finesse = 500
  linewidth = 25GHz
  mode_splitting = 50GHz
}
spin {
  zeeman = 5.8GHz
  g_factor = 0.143
  field = 2.9T
  trion_zeeman = 20GHz   # assumed, not pinned by any measurement
  gamma_x = 10GHz
  gamma_y = 10GHz
  t1 = 21us
  flip_coefficient = 0.8e-4
}
raman {
  detuning = 320GHz
  power = 1mW
  delta = 0MHz
  # coupling chosen so this operating point gives a 95 MHz spin Rabi frequency
  calibration_rabi = 95MHz
  calibration_detuning = 320GHz
  calibration_power = 1mW
}
bath {
  t2_star = 28ns
  mean = 0MHz
  set_point = 0MHz
  species {
    in115 = 1
    as75 = 1
    ga69 = 1
    ga71 = 1
  }
}
hh_channel {
  enabled = 1
  peak_rate = 8MHz
  width = 2MHz
}
protocol {
  mode = quantum_sensing
  cycles = 35
  tau_min = 10ns
  tau_max = 600ns
  drive_duration = 60ns
  drive_omega = 26MHz
  readout = 90ns
  flip_efficiency = 0.9
  flip_step = 0.3MHz
  repetitions = 80
}
noise {
  beta = 0.45
  low_cutoff = 10Hz
  high_cutoff = 100MHz
  hahn_t2 = 20us
}
readout {
  pump_rabi = 0.6GHz
  duration = 90ns
  detection_scale = 1000
}
engine {
  shots = 1000
}
)";
}

}  // namespace qdspin
