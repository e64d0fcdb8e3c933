// Nonlinear fitting and spectral analysis for simulated datasets.
#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdspin {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitResult {
  std::string model;
  std::vector<double> params;
  std::vector<double> sigmas;  // 1-sigma uncertainties
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

using ModelFn = std::function<double(double, const std::vector<double>&)>;

// Damped least squares with numeric Jacobian and box constraints.
FitResult levenberg_marquardt(const ModelFn& f, const std::vector<double>& x,
                              const std::vector<double>& y, std::vector<double> p0,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper,
                              const std::string& model_name, int max_iter = 300);

struct StretchedExpFit {
  double amplitude;
  double t2;     // 1/e time
  double alpha;  // stretch exponent, constrained to [0.3, 3]
  double t2_sigma;
  double alpha_sigma;
  FitResult raw;
};

// v(t) = A * exp(-(t/T2)^alpha). Throws FitError on non-convergence or
// constant input.
StretchedExpFit fit_stretched_exponential(const std::vector<double>& times_ns,
                                          const std::vector<double>& visibilities);

struct DampedOscillationFit {
  double frequency_ghz;
  double t2_ns;  // infinity when no decay is resolvable
  double amplitude;
  double offset;
  double phase_rad;
  double q_factor;  // 2 * T2 * f
  bool t2_unresolved = false;
  FitResult raw;
};

// s(t) = offset + amp * exp(-t/T2) * cos(2 pi f t + phase). Requires >= 3
// visible periods; throws FitError when no spectral peak stands 3x above
// the noise floor.
DampedOscillationFit fit_damped_oscillation(const std::vector<double>& times_ns,
                                            const std::vector<double>& signal);

// s(t) = offset + amp * exp(-(t/T2)^alpha) * cos(2 pi f t + phase); used for
// modulated Ramsey decays where the envelope is not a plain exponential.
struct ModulatedDecayFit {
  double frequency_ghz;
  double t2_ns;
  double alpha;
  double amplitude;
  double offset;
  double phase_rad;
  FitResult raw;
};
ModulatedDecayFit fit_modulated_decay(const std::vector<double>& times_ns,
                                      const std::vector<double>& signal);

struct PowerLawFit {
  double exponent;
  double exponent_sigma;
  double prefactor;
};

// y = prefactor * x^exponent via least squares in log-log space. Throws on
// non-positive data.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct SpectralDistribution {
  std::vector<double> frequency_ghz;
  std::vector<double> amplitude;
  double peak_frequency_ghz = 0.0;
  double bin_ghz = 0.0;
  double gaussian_width_ghz = 0.0;  // sigma of the central feature
};

// DFT of a mean-removed coherence envelope on a uniform grid. The envelope
// is reflected about t = 0 before transforming so a Gaussian decay maps to
// a real Gaussian line whose sigma is 1/(sqrt(2) pi T2). Throws on a
// non-uniform grid.
SpectralDistribution envelope_fft(const std::vector<double>& times_ns,
                                  const std::vector<double>& visibilities);

// Pi-pulse fidelity bound from a Rabi quality factor: the fitted envelope
// evaluated at the first half-period, 1/2 (1 + exp(-1/Q)).
double pi_pulse_fidelity_from_q(double q_factor);

}  // namespace qdspin
