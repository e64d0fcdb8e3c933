#include "qdspin/nuclear_bath.hpp"

#include <cmath>

#include "qdspin/analysis.hpp"
#include "qdspin/numeric.hpp"
#include "qdspin/units.hpp"

namespace qdspin {

std::vector<NuclearSpecies> default_species() {
  return {
      {"In115", 9.3857, 1.0},
      {"As75", 7.3150, 1.0},
      {"Ga69", 10.2478, 1.0},
      {"Ga71", 13.0208, 1.0},
  };
}

void OverhauserState::validate() const {
  if (sigma_ghz < 0.0) throw PhysicsError("bath.sigma must be non-negative");
}

double t2_star_from_sigma_ns(double sigma_ghz) {
  return std::sqrt(2.0) / (two_pi * sigma_ghz);
}

double sigma_from_t2_star_ghz(double t2_star_ns) {
  return std::sqrt(2.0) / (two_pi * t2_star_ns);
}

double sample_overhauser(const OverhauserState& state, Rng& rng) {
  state.validate();
  if (state.sigma_ghz == 0.0) return state.mean_ghz;
  return rng.gaussian(state.mean_ghz, state.sigma_ghz);
}

double hartmann_hahn_mismatch_ghz(double omega_ghz, double delta_ghz,
                                  const NuclearSpecies& species, double b_tesla) {
  if (omega_ghz < 0.0 || b_tesla < 0.0)
    throw PhysicsError("hartmann_hahn_mismatch: negative drive or field");
  const double dressed = std::hypot(omega_ghz, delta_ghz);
  return dressed - species.larmor_ghz(b_tesla);
}

double hartmann_hahn_damping_per_ns(double omega_ghz, double delta_ghz,
                                    const std::vector<NuclearSpecies>& species,
                                    double b_tesla, const HartmannHahnChannel& channel) {
  if (!channel.enabled) return 0.0;
  double rate = 0.0;
  for (const auto& s : species) {
    if (s.abundance_weight <= 0.0) continue;
    const double m = hartmann_hahn_mismatch_ghz(omega_ghz, delta_ghz, s, b_tesla);
    const double z = m / channel.width_ghz;
    rate += s.abundance_weight * channel.peak_rate_per_ns * std::exp(-0.5 * z * z);
  }
  return rate;
}

void CoolingProtocol::validate() const {
  if (tau_min_ns > tau_max_ns)
    throw PhysicsError("protocol.tau_min must not exceed protocol.tau_max");
  if (tau_min_ns <= 0.0 || drive_duration_ns <= 0.0 || readout_ns <= 0.0)
    throw PhysicsError("protocol durations must be positive");
  if (flip_efficiency < 0.0 || flip_efficiency > 1.0)
    throw PhysicsError("protocol.flip_efficiency must be in [0,1]");
  if (n_cycles < 1) throw PhysicsError("protocol.n_cycles must be >= 1");
  if (repetitions < 1) throw PhysicsError("protocol.repetitions must be >= 1");
  if (mode == CoolingMode::QuantumSensing && tau_max_ns <= tau_min_ns && n_cycles > 1)
    throw PhysicsError("quantum_sensing cooling requires a tau ramp");
}

double cooling_feedback_step(double overhauser_ghz, double sense_phase_rad,
                             const CoolingProtocol& protocol, Rng& rng) {
  // One flip-flop of magnitude flip_step. The sign follows the sensed
  // phase; the probability carries the coherence projection |sin|, so the
  // channel switches off as the offset approaches the set point.
  const double s = std::sin(sense_phase_rad);
  const double p = protocol.flip_efficiency * std::fabs(s);
  if (rng.uniform() >= p) return overhauser_ghz;
  return overhauser_ghz - std::copysign(protocol.flip_step_ghz, s);
}

std::vector<double> run_cooling_single(const CoolingProtocol& protocol,
                                       double overhauser0_ghz, Rng& rng,
                                       bool* phase_wrap_warning) {
  protocol.validate();
  // The trajectory is the offset from the set point.
  double x = overhauser0_ghz;
  if (phase_wrap_warning &&
      std::fabs(two_pi * x * protocol.tau_max_ns) > pi)
    *phase_wrap_warning = true;
  std::vector<double> traj;
  traj.reserve(std::size_t(protocol.n_cycles) * protocol.repetitions);
  for (int rep = 0; rep < protocol.repetitions; ++rep) {
    for (int c = 0; c < protocol.n_cycles; ++c) {
      if (protocol.mode == CoolingMode::QuantumSensing) {
        const double tau = protocol.tau_ns(c);
        x = cooling_feedback_step(x, two_pi * x * tau, protocol, rng);
      } else {
        // Rabi-drive cooling: the always-on dressed drive drags the offset
        // toward resonance without a sensing phase; weaker narrowing.
        if (rng.uniform() < protocol.flip_efficiency * 0.5)
          x -= std::copysign(std::min(protocol.flip_step_ghz, std::fabs(x)), x);
      }
      traj.push_back(x);
    }
  }
  return traj;
}

CoolingTrajectory run_cooling(const CoolingProtocol& protocol,
                              const OverhauserState& state, int runs, uint64_t seed) {
  protocol.validate();
  state.validate();
  const std::size_t cycles = std::size_t(protocol.n_cycles) * protocol.repetitions;
  std::vector<std::vector<double>> all(runs);
  std::vector<char> warned(runs, 0);
  parallel_for(std::size_t(runs), [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    const double x0 = sample_overhauser(state, rng) - state.set_point_ghz;
    bool warn = false;
    all[r] = run_cooling_single(protocol, x0, rng, &warn);
    warned[r] = warn ? 1 : 0;
  });
  CoolingTrajectory out;
  out.mean_ghz.resize(cycles);
  out.sigma_ghz.resize(cycles);
  out.final_offsets_ghz.resize(runs);
  for (std::size_t c = 0; c < cycles; ++c) {
    double m = 0.0;
    for (int r = 0; r < runs; ++r) m += all[r][c];
    m /= double(runs);
    double v = 0.0;
    for (int r = 0; r < runs; ++r) {
      const double d = all[r][c] - m;
      v += d * d;
    }
    out.mean_ghz[c] = m + state.set_point_ghz;
    out.sigma_ghz[c] = std::sqrt(v / double(std::max(runs - 1, 1)));
  }
  for (int r = 0; r < runs; ++r)
    out.final_offsets_ghz[r] = all[r].back() + state.set_point_ghz;
  for (char w : warned) out.phase_wrap_warning |= (w != 0);
  return out;
}

OverhauserState heating_delay_probe(const OverhauserState& cooled,
                                    double sigma_thermal_ghz, double delay_ns,
                                    double tau_heat_ns) {
  if (delay_ns < 0.0) throw PhysicsError("heating_delay_probe: negative delay");
  OverhauserState out = cooled;
  if (tau_heat_ns <= 0.0 || delay_ns == 0.0) return out;  // no re-thermalization
  const double f = 1.0 - std::exp(-delay_ns / tau_heat_ns);
  out.sigma_ghz = cooled.sigma_ghz + (sigma_thermal_ghz - cooled.sigma_ghz) * f;
  return out;
}

double rabi_q_factor_with_bath(double omega_ghz, const OverhauserState& bath,
                               const SpinSystem& system,
                               const std::vector<NuclearSpecies>& species,
                               const RabiQOptions& opt) {
  if (opt.shots < 1000)
    throw PhysicsError("rabi_q_factor_with_bath: need at least 1000 shots");
  const double gamma_flip =
      opt.include_flips ? laser_flip_rate_per_ns(omega_ghz, system) : 0.0;
  const int np = opt.trace_points;
  const double dt = opt.trace_ns / double(np - 1);

  const int chunks = std::max(default_thread_count() * 4, 1);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(np, 0.0));
  const int per = (opt.shots + chunks - 1) / chunks;
  parallel_for(std::size_t(chunks), [&](std::size_t chunk) {
    const int lo = int(chunk) * per;
    const int hi = std::min(lo + per, opt.shots);
    const Eigen::Vector3d v0(0.0, 0.0, -1.0);
    for (int shot = lo; shot < hi; ++shot) {
      Rng rng(derive_seed(opt.seed, 0, shot));
      const double x = opt.include_bath ? sample_overhauser(bath, rng) : bath.mean_ghz;
      const double delta = -x;  // drive kept on the nominal resonance
      const double g_hh = hartmann_hahn_damping_per_ns(omega_ghz, delta, species,
                                                       system.b_field_tesla, opt.channel);
      const BlochPropagator prop(omega_ghz, delta, 0.0, gamma_flip,
                                 1.0 / system.t1_ns(), g_hh);
      for (int i = 0; i < np; ++i)
        partial[chunk][i] += 0.5 * (1.0 + prop.at(v0, dt * i).z());
    }
  });
  std::vector<double> trace(np, 0.0);
  for (const auto& p : partial)
    for (int i = 0; i < np; ++i) trace[i] += p[i];
  for (auto& s : trace) s /= double(opt.shots);

  std::vector<double> times(np);
  for (int i = 0; i < np; ++i) times[i] = dt * i;
  auto fit = fit_damped_oscillation(times, trace);
  return fit.q_factor;
}

}  // namespace qdspin
