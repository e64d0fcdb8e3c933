#include "qdspin/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "qdspin/numeric.hpp"
#include "qdspin/units.hpp"

namespace qdspin {

void SpinSystem::validate() const {
  if (g_factor > 0.0 && b_field_tesla > 0.0) {
    const double predicted = g_factor * mu_bohr_ghz_per_tesla * b_field_tesla;
    if (std::fabs(predicted - zeeman_ghz) > 5e-3 * zeeman_ghz)
      throw PhysicsError("spin.zeeman inconsistent with g_factor * mu_B * B (>0.5%)");
  }
  if (gamma_x_per_ns <= 0.0 || gamma_y_per_ns <= 0.0)
    throw PhysicsError("spin.branching rates must be positive");
  const double ratio = std::max(gamma_x_per_ns, gamma_y_per_ns) /
                       std::min(gamma_x_per_ns, gamma_y_per_ns);
  if (ratio > 10.0)
    throw PhysicsError("spin.branching ratio beyond 1:10");
  if (t1_us <= 0.0) throw PhysicsError("spin.t1 must be positive");
  if (flip_coefficient < 0.0)
    throw PhysicsError("spin.flip_coefficient must be non-negative");
}

double spin_rabi_frequency_ghz(const RamanDrive& drive, const CavityParams& cavity) {
  if (drive.detuning_ghz == 0.0)
    throw PhysicsError(
        "spin_rabi_frequency: resonant drive, adiabatic elimination invalid");
  if (drive.power_mw < 0.0)
    throw PhysicsError("spin_rabi_frequency: negative power");
  const double enh = intensity_enhancement(drive.detuning_ghz, cavity);
  const double c = drive.calibration_ghz_per_sqrt_mw;
  return c * c * drive.power_mw * enh / drive.detuning_ghz;
}

double calibrate_raman_coupling(double omega_ghz, double detuning_ghz, double power_mw,
                                const CavityParams& cavity) {
  const double enh = intensity_enhancement(detuning_ghz, cavity);
  return std::sqrt(omega_ghz * detuning_ghz / (power_mw * enh));
}

Eigen::Vector3d rotate_bloch_rwa(const Eigen::Vector3d& bloch, double omega_ghz,
                                 double delta_ghz, double phase_rad, double t_ns) {
  const Eigen::Vector3d w(two_pi * omega_ghz * std::cos(phase_rad),
                          two_pi * omega_ghz * std::sin(phase_rad),
                          two_pi * delta_ghz);
  const double wn = w.norm();
  if (wn == 0.0 || t_ns == 0.0) return bloch;
  const Eigen::Vector3d axis = w / wn;
  // dv/dt = -w x v in this basis ordering (level 0 is spin-down), so the
  // Rodrigues rotation angle carries a minus sign.
  const double angle = -wn * t_ns;
  const double c = std::cos(angle), s = std::sin(angle);
  return bloch * c + axis.cross(bloch) * s + axis * (axis.dot(bloch)) * (1.0 - c);
}

QuantumState evolve_two_level_rwa(const QuantumState& state, double omega_ghz,
                                  double delta_ghz, double phase_rad, double t_ns) {
  if (state.dim() != 2)
    throw PhysicsError("evolve_two_level_rwa: expects the reduced qubit state");
  if (t_ns < 0.0 || omega_ghz < 0.0)
    throw PhysicsError("evolve_two_level_rwa: negative time or drive");
  return QuantumState::from_bloch(
      rotate_bloch_rwa(state.bloch(), omega_ghz, delta_ghz, phase_rad, t_ns));
}

double rwa_excited_population(double omega_ghz, double delta_ghz, double t_ns) {
  const double w2 = omega_ghz * omega_ghz + delta_ghz * delta_ghz;
  if (w2 == 0.0) return 0.0;
  const double s = std::sin(pi * std::sqrt(w2) * t_ns);
  return omega_ghz * omega_ghz / w2 * s * s;
}

QuantumState evolve_beyond_rwa(const QuantumState& state, double omega_ghz,
                               const RamanDrive& drive, const SpinSystem& system,
                               double t_ns, const BeyondRwaOptions& opt,
                               const StateObserver& observe) {
  if (state.dim() != 2)
    throw PhysicsError("evolve_beyond_rwa: expects the reduced qubit state");
  const double drive_ghz = 2.0 * drive.mw_frequency_ghz;  // Raman beat frequency
  const double fastest = std::max(system.zeeman_ghz, drive_ghz);
  if (opt.max_dt_ns > 0.0 && opt.max_dt_ns > 1.0 / (20.0 * system.zeeman_ghz))
    throw PhysicsError(
        "evolve_beyond_rwa: step size too coarse to resolve the Larmor frequency");
  const double max_dt =
      opt.max_dt_ns > 0.0 ? opt.max_dt_ns : 1.0 / (40.0 * std::max(fastest, 1e-6));

  const double wz = pi * system.zeeman_ghz;  // coefficient of sigma_z
  const double wd = two_pi * drive_ghz;
  const double phase = 2.0 * drive.mw_phase_rad;
  const Eigen::Matrix2cd sx = pauli_x(), sz = pauli_z();
  auto hamiltonian = [&](double t) -> Eigen::MatrixXcd {
    const double envelope = 1.0 + std::cos(wd * t + phase);
    return wz * sz + two_pi * omega_ghz * envelope * sx;
  };
  LindbladOptions lo;
  lo.rtol = opt.rtol;
  lo.atol = 1e-12;
  lo.max_dt_ns = max_dt;
  return evolve_lindblad_td(state, hamiltonian, {}, t_ns, lo, observe);
}

std::vector<double> beyond_rwa_population_trace(double omega_ghz,
                                                const RamanDrive& drive,
                                                const SpinSystem& system,
                                                int n_samples, double dt_ns) {
  const double drive_ghz = 2.0 * drive.mw_frequency_ghz;
  const double wz = pi * system.zeeman_ghz;
  const double wd = two_pi * drive_ghz;
  const double phase = 2.0 * drive.mw_phase_rad;
  // c = (c_down, c_up); H = wz*sz + 2pi*Omega*(1 + cos(wd t + phase))*sx
  auto rhs = [&](double t, const std::complex<double> c[2],
                 std::complex<double> dc[2]) {
    const double bx = two_pi * omega_ghz * (1.0 + std::cos(wd * t + phase));
    const std::complex<double> im(0.0, 1.0);
    dc[0] = -im * (-wz * c[0] + bx * c[1]);
    dc[1] = -im * (bx * c[0] + wz * c[1]);
  };
  const double w_max = std::max(wd + two_pi * (2.0 * omega_ghz + system.zeeman_ghz),
                                two_pi * 1.0);
  const int substeps = std::max(1, int(std::ceil(dt_ns * w_max / 2e-3)));
  const double h = dt_ns / substeps;

  std::complex<double> c[2] = {{1.0, 0.0}, {0.0, 0.0}};
  std::vector<double> trace(n_samples);
  double t = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    trace[i] = std::norm(c[1]);
    for (int s = 0; s < substeps; ++s) {
      std::complex<double> k1[2], k2[2], k3[2], k4[2], tmp[2];
      rhs(t, c, k1);
      for (int j = 0; j < 2; ++j) tmp[j] = c[j] + 0.5 * h * k1[j];
      rhs(t + 0.5 * h, tmp, k2);
      for (int j = 0; j < 2; ++j) tmp[j] = c[j] + 0.5 * h * k2[j];
      rhs(t + 0.5 * h, tmp, k3);
      for (int j = 0; j < 2; ++j) tmp[j] = c[j] + h * k3[j];
      rhs(t + h, tmp, k4);
      for (int j = 0; j < 2; ++j)
        c[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      t += h;
    }
  }
  return trace;
}

double laser_flip_rate_per_ns(double omega_ghz, const SpinSystem& system) {
  if (omega_ghz < 0.0) throw PhysicsError("laser_flip_rate: negative Rabi frequency");
  return system.flip_coefficient * (omega_ghz * 1e3);
}

void ReadoutModel::validate() const {
  if (rho11_initial < 0.0 || rho11_initial > 1.0)
    throw PhysicsError("readout.rho11_initial must be in [0,1]");
  if (theta < 0.0 || theta > 1.0) throw PhysicsError("readout.theta must be in [0,1]");
  if (pump_rabi_ghz < 0.0) throw PhysicsError("readout.pump_rabi must be >= 0");
  if (readout_duration_ns <= 0.0)
    throw PhysicsError("readout.duration must be positive");
}

double initialization_fidelity(double i_ss, double i_peak, double rho11_initial,
                               double theta, const SpinSystem& system,
                               bool lower_bound_mode) {
  if (i_peak == 0.0)
    throw PhysicsError("initialization_fidelity: I_peak is zero, fidelity undefined");
  const double ratio = i_ss / i_peak;
  if (lower_bound_mode) return 1.0 - ratio;
  const double branching = system.gamma_x_per_ns / system.gamma_total_per_ns();
  return 1.0 - rho11_initial * ratio + rho11_initial * theta * branching * ratio;
}

InitializationResult simulate_initialization(const ReadoutModel& readout,
                                             const SpinSystem& system,
                                             double pump_power_scale, double duration_ns) {
  if (duration_ns <= 0.0)
    throw PhysicsError("simulate_initialization: duration must be positive");
  readout.validate();
  // Levels: 0 = dark (spin-down), 1 = bright (spin-up), 2 = trion.
  const double w_pump =
      two_pi * readout.pump_rabi_ghz * std::sqrt(std::max(pump_power_scale, 0.0));
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(1, 2) = 0.5 * w_pump;
  h(2, 1) = 0.5 * w_pump;

  Eigen::MatrixXcd to_bright = Eigen::MatrixXcd::Zero(3, 3);
  to_bright(1, 2) = 1.0;
  Eigen::MatrixXcd to_dark = Eigen::MatrixXcd::Zero(3, 3);
  to_dark(0, 2) = 1.0;
  std::vector<Dissipator> diss = {{system.gamma_x_per_ns, to_bright},
                                  {system.gamma_y_per_ns, to_dark}};

  QuantumState init(3);
  init.rho().setZero();
  init.rho()(1, 1) = readout.rho11_initial;
  init.rho()(0, 0) = 1.0 - readout.rho11_initial;

  InitializationResult out;
  const int n_samples = 400;
  const double dt = duration_ns / n_samples;
  out.time_ns.reserve(n_samples + 1);
  out.counts.reserve(n_samples + 1);
  double next_t = 0.0;
  LindbladOptions lo;
  lo.rtol = 1e-8;
  lo.max_dt_ns = 0.25 * dt;
  evolve_lindblad(init, h, diss, duration_ns, lo,
                  [&](double t, const Eigen::MatrixXcd& rho) {
                    while (t >= next_t - 1e-12 && next_t <= duration_ns + 1e-12) {
                      out.time_ns.push_back(next_t);
                      out.counts.push_back(readout.detection_scale *
                                           system.gamma_total_per_ns() *
                                           rho(2, 2).real());
                      next_t += dt;
                    }
                  });

  out.i_peak = *std::max_element(out.counts.begin(), out.counts.end());
  const std::size_t tail = out.counts.size() / 10;
  double ss = 0.0;
  for (std::size_t i = out.counts.size() - tail; i < out.counts.size(); ++i)
    ss += out.counts[i];
  out.i_ss = ss / double(tail);

  // 1/e time of the transient: first crossing of Iss + (Ipeak-Iss)/e after
  // the peak.
  const double target = out.i_ss + (out.i_peak - out.i_ss) / std::exp(1.0);
  std::size_t peak_idx = std::size_t(
      std::max_element(out.counts.begin(), out.counts.end()) - out.counts.begin());
  out.pump_time_constant_ns = duration_ns;
  for (std::size_t i = peak_idx; i < out.counts.size(); ++i) {
    if (out.counts[i] <= target) {
      out.pump_time_constant_ns = out.time_ns[i] - out.time_ns[peak_idx];
      break;
    }
  }
  out.fidelity = initialization_fidelity(out.i_ss, out.i_peak, readout.rho11_initial,
                                         readout.theta, system,
                                         readout.lower_bound_mode);
  return out;
}

}  // namespace qdspin
