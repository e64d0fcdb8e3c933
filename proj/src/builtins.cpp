#include "qdspin/builtins.hpp"

#include <cmath>

#include "qdspin/units.hpp"

namespace qdspin {

namespace {

// All builder durations are snapped to 2^-10 ns. Dyadic durations keep
// every wall-time sum exact in binary64, so constant-spacing sequences
// (hahn, cpmg) have bit-identical totals across the sweep.
double snap_ns(double t) { return std::round(t * 1024.0) / 1024.0; }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
  return v;
}

std::vector<double> time_grid(double a, double b, int n) {
  auto v = linspace(a, b, n);
  for (auto& t : v) t = snap_ns(t);
  return v;
}

PulseElement init_el(const World& w) {
  PulseElement e;
  e.kind = ElementKind::Init;
  e.duration_ns = 30.0;
  (void)w;
  return e;
}

PulseElement readout_el(const World& w) {
  PulseElement e;
  e.kind = ElementKind::Readout;
  e.duration_ns = w.readout.readout_duration_ns;
  return e;
}

PulseElement raman_el(const World& w, double angle_fraction_of_pi, double phase) {
  PulseElement e;
  e.kind = ElementKind::Raman;
  e.omega_ghz = spin_rabi_frequency_ghz(w.raman, w.cavity);
  e.delta_ghz = w.drive_delta_ghz;
  e.phase_rad = phase;
  e.duration_ns = snap_ns(angle_fraction_of_pi * 0.5 / e.omega_ghz);
  return e;
}

PulseElement wait_el(double t) {
  PulseElement e;
  e.kind = ElementKind::Wait;
  e.duration_ns = t;
  return e;
}

}  // namespace

const std::vector<BuiltinInfo>& builtin_experiments_table() {
  static const std::vector<BuiltinInfo> table = {
      {"rabi", BuiltinKind::Sequence, "Rabi oscillations vs pulse length"},
      {"chevron", BuiltinKind::Sequence, "Rabi map vs two-photon detuning and time"},
      {"ramsey", BuiltinKind::Sequence, "phase-alternated Ramsey fringe vs delay"},
      {"hahn", BuiltinKind::CoherenceCurve, "Hahn echo visibility vs precession time"},
      {"cpmg", BuiltinKind::CoherenceCurve,
       "CPMG visibility for N in {1,2,4,8,16} vs precession time"},
      {"t1", BuiltinKind::Sequence, "spin relaxation after a pi-pulse"},
      {"hh_scan", BuiltinKind::QFactorScan,
       "Rabi Q-factor scanned across the nuclear Larmor band"},
      {"cooling_ramsey", BuiltinKind::Sequence,
       "Ramsey with the feedback cooling protocol before each point"},
      {"cooled_chevron", BuiltinKind::Sequence, "chevron with a cooled bath"},
      {"phase_sweep", BuiltinKind::Sequence,
       "two pi/2 pulses, second microwave phase swept"},
      {"init_fidelity", BuiltinKind::InitTransient,
       "optical-pumping transient and fidelity bound"},
  };
  return table;
}

bool is_builtin_experiment(const std::string& name) {
  for (const auto& b : builtin_experiments_table())
    if (b.name == name) return true;
  return false;
}

BuiltinKind builtin_kind(const std::string& name) {
  for (const auto& b : builtin_experiments_table())
    if (b.name == name) return b.kind;
  throw PhysicsError("unknown experiment '" + name + "'");
}

PulseSequence build_cpmg(const World& world, int n_pulses) {
  PulseSequence seq;
  seq.name = "cpmg";
  const double t_max = 80e3;  // 80 us
  seq.elements.push_back(init_el(world));
  seq.elements.push_back(raman_el(world, 0.5, 0.0));
  std::vector<std::size_t> wait_indices;
  for (int k = 0; k < n_pulses; ++k) {
    seq.elements.push_back(wait_el(0.0));
    wait_indices.push_back(seq.elements.size() - 1);
    // pi_y in the qubit frame: phase pi/2 (microwave phase pi/4)
    seq.elements.push_back(raman_el(world, 1.0, 0.5 * pi));
  }
  seq.elements.push_back(wait_el(0.0));
  wait_indices.push_back(seq.elements.size() - 1);
  seq.elements.push_back(raman_el(world, 0.5, 0.0));
  seq.elements.push_back(wait_el(0.0));  // pad keeps init-to-readout spacing fixed
  const std::size_t pad_index = seq.elements.size() - 1;
  seq.elements.push_back(readout_el(world));

  SweepAxis axis;
  axis.name = "T_ns";
  axis.values = time_grid(t_max / 30.0, t_max, 30);
  for (std::size_t i = 0; i < wait_indices.size(); ++i) {
    const bool edge = (i == 0 || i + 1 == wait_indices.size());
    axis.bindings.push_back(
        {wait_indices[i], "t", edge ? 0.5 / n_pulses : 1.0 / n_pulses, 0.0});
  }
  axis.bindings.push_back({pad_index, "t", -1.0, t_max});
  seq.sweeps.push_back(std::move(axis));
  return seq;
}

PulseSequence build_experiment(const std::string& name, const World& world) {
  PulseSequence seq;
  seq.name = name;

  if (name == "rabi") {
    seq.elements.push_back(init_el(world));
    seq.elements.push_back(raman_el(world, 0.0, 0.0));
    seq.elements.push_back(readout_el(world));
    SweepAxis axis;
    axis.name = "t_ns";
    axis.values = time_grid(0.0, world.rabi_trace_ns, 241);
    axis.bindings.push_back({1, "t", 1.0, 0.0});
    seq.sweeps.push_back(std::move(axis));
    return seq;
  }

  if (name == "chevron" || name == "cooled_chevron") {
    if (name == "cooled_chevron") {
      PulseElement cool;
      cool.kind = ElementKind::Cool;
      seq.elements.push_back(cool);
    }
    seq.elements.push_back(init_el(world));
    seq.elements.push_back(raman_el(world, 0.0, 0.0));
    const std::size_t pulse = seq.elements.size() - 1;
    seq.elements.push_back(readout_el(world));
    SweepAxis delta_axis;
    delta_axis.name = "delta_GHz";
    delta_axis.values = linspace(-0.2, 0.2, 101);
    delta_axis.bindings.push_back({pulse, "delta", 1.0, 0.0});
    seq.sweeps.push_back(std::move(delta_axis));
    SweepAxis t_axis;
    t_axis.name = "t_ns";
    t_axis.values = time_grid(0.0, 100.0, 101);
    t_axis.bindings.push_back({pulse, "t", 1.0, 0.0});
    seq.sweeps.push_back(std::move(t_axis));
    return seq;
  }

  if (name == "ramsey" || name == "cooling_ramsey") {
    const bool cooled = name == "cooling_ramsey";
    if (cooled) {
      PulseElement cool;
      cool.kind = ElementKind::Cool;
      seq.elements.push_back(cool);
    }
    seq.elements.push_back(init_el(world));
    seq.elements.push_back(raman_el(world, 0.5, 0.0));
    seq.elements.push_back(wait_el(0.0));
    const std::size_t wait_index = seq.elements.size() - 1;
    seq.elements.push_back(raman_el(world, 0.5, 0.0));
    const std::size_t second_pulse = seq.elements.size() - 1;
    seq.elements.push_back(readout_el(world));

    SweepAxis axis;
    axis.name = "tau_ns";
    axis.values = cooled ? time_grid(0.0, 1500.0, 151) : time_grid(0.0, 120.0, 121);
    axis.bindings.push_back({wait_index, "t", 1.0, 0.0});
    if (cooled) {
      // 10 MHz modulation added through a tau-dependent phase on the
      // second pi/2 pulse, to give the envelope fit a carrier.
      axis.bindings.push_back({second_pulse, "phase", two_pi * 0.010, 0.0});
    }
    seq.sweeps.push_back(std::move(axis));
    seq.interleave = true;
    seq.interleave_phases = {0.0, pi};
    return seq;
  }

  if (name == "hahn") {
    const double t_max = 60e3;  // 60 us
    seq.elements.push_back(init_el(world));
    seq.elements.push_back(raman_el(world, 0.5, 0.0));
    seq.elements.push_back(wait_el(0.0));
    const std::size_t w1 = seq.elements.size() - 1;
    seq.elements.push_back(raman_el(world, 1.0, 0.5 * pi));
    seq.elements.push_back(wait_el(0.0));
    const std::size_t w2 = seq.elements.size() - 1;
    seq.elements.push_back(raman_el(world, 0.5, 0.0));
    seq.elements.push_back(wait_el(0.0));  // pad keeps total wall time constant
    const std::size_t pad = seq.elements.size() - 1;
    seq.elements.push_back(readout_el(world));
    SweepAxis axis;
    axis.name = "T_ns";
    axis.values = time_grid(t_max / 30.0, t_max, 30);
    axis.bindings.push_back({w1, "t", 0.5, 0.0});
    axis.bindings.push_back({w2, "t", 0.5, 0.0});
    axis.bindings.push_back({pad, "t", -1.0, t_max});
    seq.sweeps.push_back(std::move(axis));
    seq.interleave = true;
    seq.interleave_phases = {0.0, pi};
    return seq;
  }

  if (name == "cpmg") return build_cpmg(world, 4);

  if (name == "t1") {
    seq.elements.push_back(init_el(world));
    seq.elements.push_back(raman_el(world, 1.0, 0.0));
    seq.elements.push_back(wait_el(0.0));
    const std::size_t wait_index = seq.elements.size() - 1;
    seq.elements.push_back(readout_el(world));
    SweepAxis axis;
    axis.name = "T_ns";
    axis.values = time_grid(0.0, 100e3, 51);
    axis.bindings.push_back({wait_index, "t", 1.0, 0.0});
    seq.sweeps.push_back(std::move(axis));
    return seq;
  }

  if (name == "phase_sweep") {
    seq.elements.push_back(init_el(world));
    seq.elements.push_back(raman_el(world, 0.5, 0.0));
    seq.elements.push_back(raman_el(world, 0.5, 0.0));
    const std::size_t second = seq.elements.size() - 1;
    seq.elements.push_back(readout_el(world));
    SweepAxis axis;
    axis.name = "phi_mw_rad";
    axis.values = linspace(0.0, two_pi, 101);
    // qubit-frame phase is twice the microwave phase
    axis.bindings.push_back({second, "phase", 2.0, 0.0});
    seq.sweeps.push_back(std::move(axis));
    return seq;
  }

  throw PhysicsError("unknown or non-sequence experiment '" + name + "'");
}

}  // namespace qdspin
