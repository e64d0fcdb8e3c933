// Classical dephasing noise: spectra, time-domain realizations, and the
// filter-function route to Hahn/CPMG coherence curves.
//
// Conventions. delta-omega(t) is the angular detuning noise in rad/ns.
// S(omega) is its two-sided PSD evaluated at omega >= 0 (rad/ns), so that
// Var[delta-omega] = (1/pi) Integral_0^inf S(omega) d omega and a pulse
// sequence with toggling function s(t) decays as exp(-chi) with
//   chi(T) = (1/pi) Integral S(omega) F_N(omega T) / omega^2 d omega,
//   F_0(z) = 2 sin^2(z/2),  F_Hahn(z) = 8 sin^4(z/4).
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qdspin/dynamics.hpp"
#include "qdspin/rng.hpp"

namespace qdspin {

enum class SpectrumKind { PowerLaw, Quasistatic, White };

struct NoiseSpectrum {
  SpectrumKind kind = SpectrumKind::PowerLaw;
  double amplitude = 1.0;  // A in S = A / omega^beta
  double beta = 0.45;
  double low_cutoff_ghz = 1e-8;   // 10 Hz
  double high_cutoff_ghz = 0.1;   // 100 MHz
  double white_level = 0.0;       // optional additive white floor
  double quasistatic_sigma_ghz = 0.0;  // Gaussian sigma of the frequency offset

  void validate() const;
  // Two-sided PSD at omega (rad/ns); zero outside the cutoff band.
  double psd(double omega_rad_ns) const;
};

// CPMG pi-pulse times for total precession time T: T*(2k-1)/(2N).
// n_pulses = 0 is free evolution, 1 is Hahn.
std::vector<double> cpmg_pulse_times(int n_pulses, double t_total_ns);

// Filter function F(omega T) = (omega^2/2) |y(omega)|^2 from the toggling
// transform y = Integral s(t) e^{i omega t} dt; evaluated stably as a
// finite sum of exponentials.
double cpmg_filter_function(double omega_rad_ns, int n_pulses, double t_total_ns);

// The dephasing exponent chi(T) itself (useful when exp(-chi) underflows).
double dephasing_exponent(int n_pulses, const NoiseSpectrum& spectrum,
                          double t_total_ns);

// exp(-chi(T)), with optional multiplicative relaxation exp(-T/(2 T1)).
// Quadrature relative error < 1e-4. Throws PhysicsError when the integral
// diverges at the configured cutoffs (beta >= 1, zero low cutoff, free
// evolution).
double coherence_from_filter_function(int n_pulses, const NoiseSpectrum& spectrum,
                                      double t_total_ns, double t1_ns = 0.0);

struct NoiseTrajectory {
  std::vector<double> delta_omega_rad_ns;  // angular detuning on the grid
  double dt_ns = 0.0;
  SpectrumKind kind;
};

// Time-domain realization whose periodogram matches S. Throws on a grid
// too coarse for the configured high cutoff.
NoiseTrajectory generate_noise_trajectory(const NoiseSpectrum& spectrum,
                                          double duration_ns, double dt_ns, Rng& rng);

// Periodogram estimate: returns (omega_k, S_hat_k) pairs for k >= 1.
void periodogram(const NoiseTrajectory& traj, std::vector<double>& omega_out,
                 std::vector<double>& psd_out);

// Toggled phase Integral s(t) delta-omega(t) dt for one trajectory.
double dd_accumulated_phase(const NoiseTrajectory& traj, int n_pulses,
                            double t_total_ns);

struct DdEnsembleResult {
  double visibility = 0.0;                  // |<exp(i phi)>|
  std::complex<double> mean_phase_factor;   // <exp(i phi)>
};

// Monte-Carlo visibility over fresh trajectories; deterministic in seed.
DdEnsembleResult simulate_dd_sequence_timedomain(const NoiseSpectrum& spectrum,
                                                 int n_pulses, double t_total_ns,
                                                 int realizations, double dt_ns,
                                                 uint64_t seed);

// Amplitude A that puts the Hahn 1/e time at t2_target for the given
// power-law shape (chi is linear in A).
double calibrate_amplitude_for_hahn(const NoiseSpectrum& shape, double t2_target_ns);

// 1/e time of exp(-chi(T)) for a pulse count, by bisection on T.
double t2_from_filter_function(int n_pulses, const NoiseSpectrum& spectrum,
                               double t1_ns = 0.0);

}  // namespace qdspin
