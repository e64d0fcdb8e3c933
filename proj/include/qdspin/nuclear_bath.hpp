// Semiclassical nuclear spin bath.
//
// The bath enters the qubit as a quasistatic Gaussian offset of the
// Zeeman frequency (the Overhauser shift), constant within a shot and
// resampled between shots. Hartmann-Hahn physics is modeled through the
// dressed-spin resonance condition sqrt(Omega^2 + delta^2) = omega_n per
// species: a resonance-conditioned damping channel during drive, and a
// feedback flip channel used by the cooling protocols.
#pragma once

#include <string>
#include <vector>

#include "qdspin/dynamics.hpp"
#include "qdspin/rng.hpp"

namespace qdspin {

struct NuclearSpecies {
  std::string name;
  double gyromagnetic_mhz_per_tesla;  // gamma / 2pi
  double abundance_weight = 1.0;

  double larmor_ghz(double b_tesla) const {
    return gyromagnetic_mhz_per_tesla * 1e-3 * b_tesla;
  }
};

// In-115, As-75, Ga-69, Ga-71 with tabulated gyromagnetic ratios.
std::vector<NuclearSpecies> default_species();

struct OverhauserState {
  double mean_ghz = 0.0;   // offset of the hole Zeeman frequency
  double sigma_ghz = 0.0;  // quasistatic spread
  double set_point_ghz = 0.0;

  void validate() const;
};

// T2* = sqrt(2) / (2 pi sigma_f) for Gaussian quasistatic averaging.
double t2_star_from_sigma_ns(double sigma_ghz);
double sigma_from_t2_star_ghz(double t2_star_ns);

// Gaussian draw of the quasistatic Overhauser offset for one shot.
double sample_overhauser(const OverhauserState& state, Rng& rng);

// sqrt((Omega/2pi)^2 + delta^2) - omega_n/2pi, all in GHz.
double hartmann_hahn_mismatch_ghz(double omega_ghz, double delta_ghz,
                                  const NuclearSpecies& species, double b_tesla);

struct HartmannHahnChannel {
  bool enabled = true;
  double peak_rate_per_ns = 0.008;  // extra damping at exact resonance
  double width_ghz = 2.0e-3;        // Gaussian width of the resonance
};

// Resonance-conditioned damping rate summed over species.
double hartmann_hahn_damping_per_ns(double omega_ghz, double delta_ghz,
                                    const std::vector<NuclearSpecies>& species,
                                    double b_tesla, const HartmannHahnChannel& channel);

enum class CoolingMode { RabiDrive, QuantumSensing };

struct CoolingProtocol {
  CoolingMode mode = CoolingMode::QuantumSensing;
  int n_cycles = 35;
  double tau_min_ns = 10.0;
  double tau_max_ns = 600.0;
  double drive_duration_ns = 60.0;  // T_c
  double drive_omega_ghz = 26e-3;   // Omega_c
  double readout_ns = 90.0;
  // Probability scale of one effective nuclear flip per resonant cycle and
  // the Overhauser step it causes. Free calibration parameters.
  double flip_efficiency = 0.9;
  double flip_step_ghz = 0.3e-3;
  // The sequence persists on the nuclear state between experiment points;
  // repetitions emulate that persistence for an independent-shot engine.
  int repetitions = 80;

  void validate() const;
  double tau_ns(int cycle) const {
    if (n_cycles <= 1) return tau_min_ns;
    return tau_min_ns + (tau_max_ns - tau_min_ns) * double(cycle) / double(n_cycles - 1);
  }
};

// One sensing/correction cycle applied to a concrete Overhauser offset.
// sense_phase_rad is the phase the qubit accumulated relative to the set
// point during the sensing window. Returns the corrected offset.
double cooling_feedback_step(double overhauser_ghz, double sense_phase_rad,
                             const CoolingProtocol& protocol, Rng& rng);

// Full protocol against a single sampled Overhauser offset; returns the
// offset after every cycle (repetitions included, so the trajectory has
// n_cycles * repetitions entries).
std::vector<double> run_cooling_single(const CoolingProtocol& protocol,
                                       double overhauser0_ghz, Rng& rng,
                                       bool* phase_wrap_warning = nullptr);

struct CoolingTrajectory {
  std::vector<double> mean_ghz;   // per cycle, ensemble mean
  std::vector<double> sigma_ghz;  // per cycle, ensemble spread
  std::vector<double> final_offsets_ghz;
  bool phase_wrap_warning = false;
};

// Ensemble of independent runs from the thermal distribution; per-cycle
// mean and sigma plus the final cooled sample.
CoolingTrajectory run_cooling(const CoolingProtocol& protocol,
                              const OverhauserState& state, int runs, uint64_t seed);

// sigma(delay) = sigma_cooled + (sigma_thermal - sigma_cooled) *
// (1 - exp(-delay/tau_heat)); tau_heat <= 0 means no re-thermalization.
OverhauserState heating_delay_probe(const OverhauserState& cooled,
                                    double sigma_thermal_ghz, double delay_ns,
                                    double tau_heat_ns);

struct RabiQOptions {
  int shots = 2000;
  double trace_ns = 400.0;
  int trace_points = 160;
  HartmannHahnChannel channel;
  bool include_bath = true;
  bool include_flips = true;
  uint64_t seed = 1;
};

// Monte-Carlo Rabi trace (Overhauser spread + laser flips + Hartmann-Hahn
// damping), fitted to a damped cosine; returns Q = 2 T2 f.
double rabi_q_factor_with_bath(double omega_ghz, const OverhauserState& bath,
                               const SpinSystem& system,
                               const std::vector<NuclearSpecies>& species,
                               const RabiQOptions& opt);

}  // namespace qdspin
