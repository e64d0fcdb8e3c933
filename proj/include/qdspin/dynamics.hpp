// Hole-spin dynamics: Raman Rabi coupling, effective two-level evolution
// with and without the rotating-wave approximation, optical pumping.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "qdspin/cavity.hpp"
#include "qdspin/lindblad.hpp"
#include "qdspin/quantum_state.hpp"

namespace qdspin {

struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpinSystem {
  double zeeman_ghz = 5.8;       // hole Zeeman splitting Z_h
  double g_factor = 0.143;       // hole g-factor
  double b_field_tesla = 2.9;
  double trion_zeeman_ghz = 20.0;  // level bookkeeping only (assumed, not measured)
  double gamma_x_per_ns = 10.0;  // trion -> spin-up decay (1/ns)
  double gamma_y_per_ns = 10.0;  // trion -> spin-down decay (1/ns)
  double t1_us = 21.0;
  // Laser-induced incoherent flip coefficient, 1/ns per MHz of spin Rabi.
  double flip_coefficient = 0.8e-4;

  double gamma_total_per_ns() const { return gamma_x_per_ns + gamma_y_per_ns; }
  double t1_ns() const { return t1_us * 1e3; }
  // Zeeman consistency (0.5%), positive branching with ratio <= 1:10.
  void validate() const;
};

struct RamanDrive {
  double detuning_ghz = 320.0;  // optical detuning from the trion
  double power_mw = 1.0;
  double mw_frequency_ghz = 2.9;  // f_mw; two sidebands at +- f_mw
  double mw_phase_rad = 0.0;      // phi_mw; qubit-frame phase is 2*phi_mw
  // Optical Rabi coupling per sqrt(mW) at unit enhancement, GHz.
  double calibration_ghz_per_sqrt_mw = 3.9587;

  double two_photon_detuning_ghz(const SpinSystem& sys) const {
    return 2.0 * mw_frequency_ghz - sys.zeeman_ghz;
  }
  static double mw_frequency_for_delta(double delta_ghz, const SpinSystem& sys) {
    return 0.5 * (sys.zeeman_ghz + delta_ghz);
  }
};

// Spin Rabi frequency Omega/2pi in GHz:
//   Omega = C^2 * P * enhancement(detuning) / detuning.
// Throws on zero detuning (adiabatic elimination invalid).
double spin_rabi_frequency_ghz(const RamanDrive& drive, const CavityParams& cavity);

// Calibration constant that makes spin_rabi_frequency hit omega_ghz at the
// given operating point.
double calibrate_raman_coupling(double omega_ghz, double detuning_ghz, double power_mw,
                                const CavityParams& cavity);

// RWA qubit evolution: H = pi*Omega*(cos phi sx + sin phi sy) + pi*delta*sz
// applied for t_ns (exact SU(2) rotation). phase is the qubit-frame phase.
QuantumState evolve_two_level_rwa(const QuantumState& state, double omega_ghz,
                                  double delta_ghz, double phase_rad, double t_ns);
Eigen::Vector3d rotate_bloch_rwa(const Eigen::Vector3d& bloch, double omega_ghz,
                                 double delta_ghz, double phase_rad, double t_ns);

// Closed-form chevron: P_up(t) from spin-down under the RWA Hamiltonian.
double rwa_excited_population(double omega_ghz, double delta_ghz, double t_ns);

// Lab-frame evolution keeping the full Raman beat. The two sidebands
// produce a transverse coupling proportional to the instantaneous optical
// intensity envelope,
//   H(t) = pi*Z_h*sz + 2pi*Omega*[1 + cos(2pi*(2 f_mw)*t + 2 phi_mw)]*sx,
// whose rotating-wave reduction is the Hamiltonian above with qubit phase
// 2*phi_mw and delta = 2 f_mw - Z_h. Throws when max_dt_ns > 1/(20 Z_h).
struct BeyondRwaOptions {
  double rtol = 1e-8;
  double max_dt_ns = 0.0;  // 0 = auto (1/(40 * drive frequency))
};
QuantumState evolve_beyond_rwa(const QuantumState& state, double omega_ghz,
                               const RamanDrive& drive, const SpinSystem& system,
                               double t_ns, const BeyondRwaOptions& opt = {},
                               const StateObserver& observe = nullptr);

// Spin-up population sampled on a uniform grid under the same lab-frame
// Hamiltonian (fixed-step RK4 on the state vector; the grid must resolve
// the Raman beat, so n_samples * dt_ns covers the trace and substeps are
// chosen internally).
std::vector<double> beyond_rwa_population_trace(double omega_ghz,
                                                const RamanDrive& drive,
                                                const SpinSystem& system,
                                                int n_samples, double dt_ns);

// Laser-induced incoherent spin-flip rate (1/ns per direction) at spin
// Rabi frequency omega_ghz.
double laser_flip_rate_per_ns(double omega_ghz, const SpinSystem& system);

struct ReadoutModel {
  double rho11_initial = 1.0;  // bright-state population before the pulse
  double theta = 0.0;          // rho22 / (rho11 + rho22)
  double pump_rabi_ghz = 0.6;  // optical Rabi coupling of the pump laser
  double readout_duration_ns = 90.0;
  double detection_scale = 1000.0;  // counts per unit emitted population
  bool lower_bound_mode = true;
  void validate() const;
};

struct InitializationResult {
  std::vector<double> time_ns;
  std::vector<double> counts;  // fluorescence trace
  double i_peak = 0.0;
  double i_ss = 0.0;
  double fidelity = 0.0;
  double pump_time_constant_ns = 0.0;  // 1/e time of the fitted transient
};

// Optical-pumping transient (three-level Lindblad: bright, dark, trion)
// plus the fidelity formula
//   F = 1 - rho11(0) * Iss/Ipeak + rho11(0) * Theta * (gx/g0) * Iss/Ipeak,
// with the last term dropped and rho11(0) = 1 in lower-bound mode.
InitializationResult simulate_initialization(const ReadoutModel& readout,
                                             const SpinSystem& system,
                                             double pump_power_scale, double duration_ns);

// Fidelity formula alone, for direct checks. Throws if i_peak == 0.
double initialization_fidelity(double i_ss, double i_peak, double rho11_initial,
                               double theta, const SpinSystem& system,
                               bool lower_bound_mode);

}  // namespace qdspin
