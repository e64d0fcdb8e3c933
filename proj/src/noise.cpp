#include "qdspin/noise.hpp"

#include <algorithm>
#include <cmath>

#include "qdspin/numeric.hpp"
#include "qdspin/units.hpp"

namespace qdspin {

void NoiseSpectrum::validate() const {
  if (beta < 0.0 || beta > 2.0)
    throw PhysicsError("noise.beta must be in [0, 2]");
  if (kind == SpectrumKind::PowerLaw) {
    if (low_cutoff_ghz <= 0.0 && beta > 0.0)
      throw PhysicsError("noise.low_cutoff must be positive for a power-law spectrum");
    if (high_cutoff_ghz <= low_cutoff_ghz)
      throw PhysicsError("noise.cutoffs must satisfy low < high");
  }
  if (quasistatic_sigma_ghz < 0.0 || white_level < 0.0 || amplitude < 0.0)
    throw PhysicsError("noise parameters must be non-negative");
}

double NoiseSpectrum::psd(double w) const {
  switch (kind) {
    case SpectrumKind::White:
      return white_level;
    case SpectrumKind::Quasistatic:
      return 0.0;  // handled analytically, a delta spike at omega = 0
    case SpectrumKind::PowerLaw: {
      const double wlo = two_pi * low_cutoff_ghz, whi = two_pi * high_cutoff_ghz;
      if (w < wlo || w > whi) return white_level;
      return amplitude / std::pow(w, beta) + white_level;
    }
  }
  return 0.0;
}

std::vector<double> cpmg_pulse_times(int n_pulses, double t_total_ns) {
  std::vector<double> times;
  times.reserve(n_pulses);
  for (int k = 1; k <= n_pulses; ++k)
    times.push_back(t_total_ns * (2.0 * k - 1.0) / (2.0 * n_pulses));
  return times;
}

double cpmg_filter_function(double w, int n_pulses, double t_total) {
  // y(w) = sum_j (-1)^j (e^{i w t_{j+1}} - e^{i w t_j}) / (i w),
  // F = (w^2/2) |y|^2 = (1/2) |sum_j (-1)^j (e^{i w t_{j+1}} - e^{i w t_j})|^2.
  const auto pulses = cpmg_pulse_times(n_pulses, t_total);
  std::complex<double> acc(0.0, 0.0);
  double t_prev = 0.0;
  double sign = 1.0;
  for (double tp : pulses) {
    acc += sign * (std::polar(1.0, w * tp) - std::polar(1.0, w * t_prev));
    t_prev = tp;
    sign = -sign;
  }
  acc += sign * (std::polar(1.0, w * t_total) - std::polar(1.0, w * t_prev));
  return 0.5 * std::norm(acc);
}

namespace {

// Integrates S(w) F(w T) / w^2 over the cutoff band with panels no wider
// than a quarter oscillation of the filter.
double chi_quadrature(const NoiseSpectrum& spec, int n_pulses, double t_total) {
  const double wlo = two_pi * spec.low_cutoff_ghz;
  const double whi = two_pi * spec.high_cutoff_ghz;
  // 5-point Gauss-Legendre on [-1, 1]
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                               0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double osc_panel = pi / (2.0 * t_total);
  double total = 0.0;
  double w = wlo;
  while (w < whi) {
    const double dw = std::min({0.08 * w, osc_panel, whi - w});
    const double mid = w + 0.5 * dw, half = 0.5 * dw;
    double panel = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double wi = mid + half * gx[i];
      panel += gw[i] * spec.psd(wi) * cpmg_filter_function(wi, n_pulses, t_total) /
               (wi * wi);
    }
    total += panel * half;
    w += dw;
  }
  return total / pi;
}

}  // namespace

double dephasing_exponent(int n_pulses, const NoiseSpectrum& spectrum,
                          double t_total_ns) {
  spectrum.validate();
  if (n_pulses < 0 || t_total_ns < 0.0)
    throw PhysicsError("dephasing_exponent: invalid sequence");
  if (t_total_ns == 0.0) return 0.0;
  switch (spectrum.kind) {
    case SpectrumKind::Quasistatic: {
      // A static offset is perfectly refocused by any echo.
      if (n_pulses > 0) return 0.0;
      const double sw = two_pi * spectrum.quasistatic_sigma_ghz;
      return 0.5 * sw * sw * t_total_ns * t_total_ns;
    }
    case SpectrumKind::White:
    case SpectrumKind::PowerLaw: {
      if (spectrum.kind == SpectrumKind::PowerLaw && spectrum.beta >= 1.0 &&
          spectrum.low_cutoff_ghz <= 0.0 && n_pulses == 0)
        throw PhysicsError(
            "dephasing_exponent: divergent integral, low cutoff required");
      return chi_quadrature(spectrum, n_pulses, t_total_ns);
    }
  }
  return 0.0;
}

double coherence_from_filter_function(int n_pulses, const NoiseSpectrum& spectrum,
                                      double t_total_ns, double t1_ns) {
  double v = std::exp(-dephasing_exponent(n_pulses, spectrum, t_total_ns));
  if (t1_ns > 0.0) v *= std::exp(-t_total_ns / (2.0 * t1_ns));
  return v;
}

NoiseTrajectory generate_noise_trajectory(const NoiseSpectrum& spectrum,
                                          double duration_ns, double dt_ns, Rng& rng) {
  spectrum.validate();
  NoiseTrajectory traj;
  traj.dt_ns = dt_ns;
  traj.kind = spectrum.kind;
  const std::size_t n_req = std::size_t(std::ceil(duration_ns / dt_ns)) + 1;

  if (spectrum.kind == SpectrumKind::Quasistatic) {
    const double value = rng.gaussian(0.0, two_pi * spectrum.quasistatic_sigma_ghz);
    traj.delta_omega_rad_ns.assign(n_req, value);
    return traj;
  }
  if (dt_ns > 0.25 / spectrum.high_cutoff_ghz)
    throw PhysicsError("generate_noise_trajectory: dt too coarse, aliasing");

  const std::size_t n = next_pow2(n_req);
  const double dw = two_pi / (double(n) * dt_ns);
  std::vector<cdouble> c(n, cdouble(0.0, 0.0));
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double w = double(k) * dw;
    const double s2 = spectrum.psd(w) * dw / pi;  // per-mode variance
    if (s2 <= 0.0) continue;
    const double s = std::sqrt(s2);
    const double a = rng.gaussian(0.0, s), b = rng.gaussian(0.0, s);
    c[k] = 0.5 * cdouble(a, -b);
    c[n - k] = std::conj(c[k]);
  }
  {
    const double w = double(n / 2) * dw;
    const double s2 = spectrum.psd(w) * dw / pi;
    c[n / 2] = cdouble(s2 > 0.0 ? rng.gaussian(0.0, std::sqrt(0.5 * s2)) : 0.0, 0.0);
  }
  fft_pow2(c, +1);  // unscaled inverse; coefficients already carry the scale
  traj.delta_omega_rad_ns.resize(n_req);
  for (std::size_t i = 0; i < n_req; ++i) traj.delta_omega_rad_ns[i] = c[i].real();
  return traj;
}

void periodogram(const NoiseTrajectory& traj, std::vector<double>& omega_out,
                 std::vector<double>& psd_out) {
  // largest power-of-two window that fits
  std::size_t n = 1;
  while (n * 2 <= traj.delta_omega_rad_ns.size()) n <<= 1;
  std::vector<cdouble> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = traj.delta_omega_rad_ns[i];
  fft_pow2(buf, -1);
  const double dw = two_pi / (double(n) * traj.dt_ns);
  omega_out.clear();
  psd_out.clear();
  // S_hat(w_k) = |X_k|^2 dt / N (two-sided), matching the synthesis scale.
  const double scale = traj.dt_ns / double(n);
  for (std::size_t k = 1; k < n / 2; ++k) {
    omega_out.push_back(double(k) * dw);
    psd_out.push_back(std::norm(buf[k]) * scale);
  }
}

double dd_accumulated_phase(const NoiseTrajectory& traj, int n_pulses,
                            double t_total_ns) {
  const double dt = traj.dt_ns;
  const std::size_t n_steps = std::size_t(std::floor(t_total_ns / dt + 0.5));
  if (n_steps + 1 > traj.delta_omega_rad_ns.size())
    throw PhysicsError("dd_accumulated_phase: trajectory shorter than the sequence");
  // pulse times snapped to the grid
  std::vector<std::size_t> flips;
  for (double tp : cpmg_pulse_times(n_pulses, t_total_ns))
    flips.push_back(std::size_t(std::floor(tp / dt + 0.5)));
  double phase = 0.0;
  double sign = 1.0;
  std::size_t next_flip = 0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    while (next_flip < flips.size() && i == flips[next_flip]) {
      sign = -sign;
      ++next_flip;
    }
    phase += sign * 0.5 *
             (traj.delta_omega_rad_ns[i] + traj.delta_omega_rad_ns[i + 1]) * dt;
  }
  return phase;
}

DdEnsembleResult simulate_dd_sequence_timedomain(const NoiseSpectrum& spectrum,
                                                 int n_pulses, double t_total_ns,
                                                 int realizations, double dt_ns,
                                                 uint64_t seed) {
  const int chunks = std::max(default_thread_count() * 4, 1);
  std::vector<cdouble> partial(chunks, cdouble(0.0, 0.0));
  const int per = (realizations + chunks - 1) / chunks;
  parallel_for(std::size_t(chunks), [&](std::size_t chunk) {
    const int lo = int(chunk) * per;
    const int hi = std::min(lo + per, realizations);
    cdouble acc(0.0, 0.0);
    for (int r = lo; r < hi; ++r) {
      Rng rng(derive_seed(seed, 1, r));
      const auto traj = generate_noise_trajectory(spectrum, t_total_ns, dt_ns, rng);
      const double phi = dd_accumulated_phase(traj, n_pulses, t_total_ns);
      acc += std::polar(1.0, phi);
    }
    partial[chunk] = acc;
  });
  cdouble mean(0.0, 0.0);
  for (const auto& p : partial) mean += p;
  mean /= double(realizations);
  return {std::abs(mean), mean};
}

double calibrate_amplitude_for_hahn(const NoiseSpectrum& shape, double t2_target_ns) {
  NoiseSpectrum unit = shape;
  unit.amplitude = 1.0;
  unit.white_level = 0.0;
  const double chi1 = dephasing_exponent(1, unit, t2_target_ns);
  if (chi1 <= 0.0)
    throw PhysicsError("calibrate_amplitude_for_hahn: degenerate spectrum");
  return 1.0 / chi1;
}

double t2_from_filter_function(int n_pulses, const NoiseSpectrum& spectrum,
                               double t1_ns) {
  // chi(T) + T/(2 T1) = 1 by bisection
  auto exponent = [&](double t) {
    double chi = dephasing_exponent(n_pulses, spectrum, t);
    if (t1_ns > 0.0) chi += t / (2.0 * t1_ns);
    return chi;
  };
  double lo = 1.0, hi = 1.0;
  while (exponent(hi) < 1.0) {
    hi *= 2.0;
    if (hi > 1e9) throw PhysicsError("t2_from_filter_function: no decay in range");
  }
  while (exponent(lo) > 1.0) {
    lo *= 0.5;
    if (lo < 1e-6) throw PhysicsError("t2_from_filter_function: immediate decay");
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (exponent(mid) < 1.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qdspin
