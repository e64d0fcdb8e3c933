#include "qdspin/engine.hpp"

#include <cmath>

#include "qdspin/numeric.hpp"
#include "qdspin/units.hpp"

namespace qdspin {

double World::resolve_omega_ghz(const PulseElement& el) const {
  if (el.omega_ghz >= 0.0) return el.omega_ghz;
  RamanDrive d = raman;
  if (el.power_mw >= 0.0) d.power_mw = el.power_mw;
  if (el.detuning_ghz != 0.0) d.detuning_ghz = el.detuning_ghz;
  return spin_rabi_frequency_ghz(d, cavity);
}

void World::validate() const {
  cavity.validate();
  spin.validate();
  bath.validate();
  protocol.validate();
  noise.validate();
  readout.validate();
}

World default_world() {
  World w;
  w.raman.calibration_ghz_per_sqrt_mw =
      calibrate_raman_coupling(0.095, 320.0, 1.0, w.cavity);
  w.bath.sigma_ghz = sigma_from_t2_star_ghz(28.0);
  w.noise.amplitude = 0.0;  // calibrated on demand against the Hahn target
  return w;
}

double ExperimentResult::axis_at(std::size_t a, std::size_t idx) const {
  std::size_t rem = idx;
  for (std::size_t i = axis_grids.size(); i-- > 0;) {
    const std::size_t n = axis_grids[i].size();
    if (i == a) return axis_grids[i][rem % n];
    rem /= n;
  }
  throw std::out_of_range("axis_at: no such axis");
}

namespace {

struct ShotOutcome {
  double signal = 0.0;
  double readout_z = 0.0;  // z just before the recorded readout resets the spin
};

class ShotRunner {
 public:
  ShotRunner(const World& world, const std::vector<PulseElement>& elements)
      : w_(world), elements_(elements) {
    // The rotating frame is set by the first Raman element's two-photon
    // detuning (one microwave source per sequence).
    for (const auto& el : elements_) {
      if (el.kind == ElementKind::Raman) {
        delta_lo_ = el.delta_ghz;
        break;
      }
    }
  }

  ShotOutcome run(Rng& rng, double extra_phase_on_last_raman) {
    std::size_t last_raman = elements_.size();
    for (std::size_t i = elements_.size(); i-- > 0;)
      if (elements_[i].kind == ElementKind::Raman) {
        last_raman = i;
        break;
      }

    double x = w_.bath_enabled ? sample_overhauser(w_.bath, rng) : w_.bath.mean_ghz;
    Eigen::Vector3d v = init_vector(rng);
    double sense_phase = 0.0;
    double readout_z = 0.0, signal = 0.0;

    const double g_t1 = w_.t1_enabled ? 1.0 / w_.spin.t1_ns() : 0.0;

    for (std::size_t i = 0; i < elements_.size(); ++i) {
      const PulseElement& el = elements_[i];
      switch (el.kind) {
        case ElementKind::Init:
          v = init_vector(rng);
          sense_phase = 0.0;
          break;
        case ElementKind::Raman: {
          const double omega = w_.resolve_omega_ghz(el);
          double phase = el.phase_rad;
          if (i == last_raman) phase += extra_phase_on_last_raman;
          const double delta_eff = el.delta_ghz - x;
          const double g_flip =
              w_.flips_enabled ? laser_flip_rate_per_ns(omega, w_.spin) : 0.0;
          const double g_hh =
              w_.hh_damping_enabled
                  ? hartmann_hahn_damping_per_ns(omega, delta_eff, w_.species,
                                                 w_.spin.b_field_tesla, w_.hh_channel)
                  : 0.0;
          if (w_.non_rwa && g_flip == 0.0 && g_hh == 0.0 && g_t1 == 0.0) {
            SpinSystem sys = w_.spin;
            sys.zeeman_ghz += x;  // Overhauser shift of the Larmor frequency
            RamanDrive d = w_.raman;
            d.mw_frequency_ghz = 0.5 * (w_.spin.zeeman_ghz + el.delta_ghz);
            d.mw_phase_rad = 0.5 * phase;
            auto out = evolve_beyond_rwa(QuantumState::from_bloch(v), omega, d, sys,
                                         el.duration_ns);
            v = out.bloch();
          } else if (g_flip == 0.0 && g_hh == 0.0 && g_t1 == 0.0) {
            v = rotate_bloch_rwa(v, omega, delta_eff, phase, el.duration_ns);
          } else {
            v = evolve_bloch_damped(v, omega, delta_eff, phase, el.duration_ns,
                                    g_flip, g_t1, g_hh);
          }
          break;
        }
        case ElementKind::Wait: {
          const double delta_eff = delta_lo_ - x;
          if (g_t1 == 0.0)
            v = rotate_bloch_rwa(v, 0.0, delta_eff, 0.0, el.duration_ns);
          else
            v = evolve_bloch_damped(v, 0.0, delta_eff, 0.0, el.duration_ns, 0.0,
                                    g_t1, 0.0);
          sense_phase += two_pi * (x - w_.bath.set_point_ghz) * el.duration_ns;
          break;
        }
        case ElementKind::HHDrive: {
          const double omega = el.omega_ghz >= 0.0 ? el.omega_ghz
                                                   : w_.protocol.drive_omega_ghz;
          const double delta_eff = delta_lo_ - x;
          const double g_hh =
              w_.hh_damping_enabled
                  ? hartmann_hahn_damping_per_ns(omega, delta_eff, w_.species,
                                                 w_.spin.b_field_tesla, w_.hh_channel)
                  : 0.0;
          v = evolve_bloch_damped(v, omega, delta_eff, 0.0, el.duration_ns, 0.0,
                                  g_t1, g_hh);
          const double x_rel = x - w_.bath.set_point_ghz;
          const double corrected =
              cooling_feedback_step(x_rel, sense_phase, w_.protocol, rng);
          x = corrected + w_.bath.set_point_ghz;
          sense_phase = 0.0;
          break;
        }
        case ElementKind::Cool: {
          // Full cooling protocol applied to the shot's Overhauser offset;
          // the spin is reset by the protocol's own readouts.
          const double x_rel = x - w_.bath.set_point_ghz;
          auto traj = run_cooling_single(w_.protocol, x_rel, rng);
          x = traj.back() + w_.bath.set_point_ghz;
          v = init_vector(rng);
          sense_phase = 0.0;
          break;
        }
        case ElementKind::Readout: {
          readout_z = v.z();
          double s = w_.readout.detection_scale * 0.5 * (1.0 + v.z());
          if (w_.poisson_counts) s = double(rng.poisson(s));
          signal = s;  // the last readout is the recorded one
          v = init_vector(rng);
          sense_phase = 0.0;
          break;
        }
        case ElementKind::Barrier:
          break;
      }
    }
    return {signal, readout_z};
  }

 private:
  Eigen::Vector3d init_vector(Rng& rng) const {
    if (w_.init_infidelity <= 0.0) return Eigen::Vector3d(0.0, 0.0, -1.0);
    return Eigen::Vector3d(0.0, 0.0, -1.0 + 2.0 * w_.init_infidelity);
  }

  const World& w_;
  const std::vector<PulseElement>& elements_;
  double delta_lo_ = 0.0;
};

}  // namespace

ExperimentResult run_experiment(const PulseSequence& seq, const World& world,
                                int shots, uint64_t seed) {
  seq.validate();
  if (shots < 1) throw PhysicsError("run_experiment: shots must be >= 1");

  ExperimentResult res;
  res.experiment = seq.name;
  res.shots = shots;
  res.seed = seed;
  for (const auto& axis : seq.sweeps) {
    res.axis_names.push_back(axis.name);
    res.axis_grids.push_back(axis.values);
  }
  const std::size_t n_points = seq.n_points();
  res.mean.assign(n_points, 0.0);
  res.stderr_of_mean.assign(n_points, 0.0);
  res.mean_readout_z.assign(n_points, 0.0);

  std::vector<double> phases = seq.interleave && !seq.interleave_phases.empty()
                                   ? seq.interleave_phases
                                   : std::vector<double>{0.0};
  const bool alternate = seq.interleave && phases.size() >= 2;
  const double scale = world.readout.detection_scale;

  parallel_for(n_points, [&](std::size_t p) {
    const auto elements = seq.materialize(p);
    ShotRunner runner(world, elements);
    double sum = 0.0, sum_sq = 0.0, zsum = 0.0;
    for (int shot = 0; shot < shots; ++shot) {
      Rng rng(derive_seed(seed, p, shot));
      double value = 0.0, z = 0.0;
      if (alternate) {
        // Phase-alternated pair on one bath sample: combined as
        // (S(p0) + (scale - S(p0+pi)))/2 so the pair shares offset/scale.
        const auto a = runner.run(rng, phases[0]);
        const auto b = runner.run(rng, phases[1]);
        value = 0.5 * (a.signal + (scale - b.signal));
        z = 0.5 * (a.readout_z + b.readout_z);
      } else {
        const auto a = runner.run(rng, phases[0]);
        value = a.signal;
        z = a.readout_z;
      }
      sum += value;
      sum_sq += value * value;
      zsum += z;
    }
    const double mean = sum / double(shots);
    res.mean[p] = mean;
    if (shots > 1) {
      const double var =
          std::max(0.0, (sum_sq - double(shots) * mean * mean) / double(shots - 1));
      res.stderr_of_mean[p] = std::sqrt(var / double(shots));
    }
    res.mean_readout_z[p] = zsum / double(shots);
  });
  return res;
}

}  // namespace qdspin
