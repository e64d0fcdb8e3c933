#include "qdspin/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "qdspin/numeric.hpp"
#include "qdspin/units.hpp"

namespace qdspin {

namespace {

double clampv(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double sum_sq_residual(const ModelFn& f, const std::vector<double>& x,
                       const std::vector<double>& y, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f(x[i], p);
    s += r * r;
  }
  return s;
}

}  // namespace

FitResult levenberg_marquardt(const ModelFn& f, const std::vector<double>& x,
                              const std::vector<double>& y, std::vector<double> p,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper,
                              const std::string& model_name, int max_iter) {
  const std::size_t n = x.size();
  const std::size_t np = p.size();
  if (n < np) throw FitError(model_name + ": fewer points than parameters");

  auto clamp_params = [&](std::vector<double>& q) {
    for (std::size_t j = 0; j < np; ++j) q[j] = clampv(q[j], lower[j], upper[j]);
  };
  clamp_params(p);

  Eigen::MatrixXd jac(n, np);
  Eigen::VectorXd resid(n);
  double chi2 = sum_sq_residual(f, x, y, p);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) resid(i) = y[i] - f(x[i], p);
    // central-difference Jacobian
    for (std::size_t j = 0; j < np; ++j) {
      const double scale = std::max(std::fabs(p[j]), 1e-8);
      const double h = 1e-6 * scale;
      std::vector<double> pp = p, pm = p;
      pp[j] = clampv(p[j] + h, lower[j], upper[j]);
      pm[j] = clampv(p[j] - h, lower[j], upper[j]);
      const double denom = pp[j] - pm[j];
      for (std::size_t i = 0; i < n; ++i)
        jac(i, j) = denom != 0.0 ? (f(x[i], pp) - f(x[i], pm)) / denom : 0.0;
    }
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd jtr = jac.transpose() * resid;

    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (std::size_t j = 0; j < np; ++j) a(j, j) += lambda * std::max(jtj(j, j), 1e-12);
      Eigen::VectorXd step = a.ldlt().solve(jtr);
      std::vector<double> trial = p;
      for (std::size_t j = 0; j < np; ++j) trial[j] += step(j);
      clamp_params(trial);
      const double trial_chi2 = sum_sq_residual(f, x, y, trial);
      if (trial_chi2 <= chi2) {
        double rel_step = 0.0;
        for (std::size_t j = 0; j < np; ++j)
          rel_step = std::max(rel_step, std::fabs(trial[j] - p[j]) /
                                            std::max(std::fabs(p[j]), 1e-12));
        const double rel_impr = (chi2 - trial_chi2) / std::max(chi2, 1e-300);
        p = trial;
        chi2 = trial_chi2;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (rel_step < 1e-10 || rel_impr < 1e-12) converged = true;
        break;
      }
      lambda *= 8.0;
    }
    if (converged) break;
    if (!accepted) {
      // no damping level improves chi2: stalled at a (local) minimum
      converged = true;
      break;
    }
  }

  FitResult out;
  out.model = model_name;
  out.params = p;
  out.converged = converged;
  out.iterations = iter;
  out.residual_norm = std::sqrt(chi2);

  // 1-sigma uncertainties from the residual covariance.
  for (std::size_t i = 0; i < n; ++i) resid(i) = y[i] - f(x[i], p);
  for (std::size_t j = 0; j < np; ++j) {
    const double scale = std::max(std::fabs(p[j]), 1e-8);
    const double h = 1e-6 * scale;
    std::vector<double> pp = p, pm = p;
    pp[j] = clampv(p[j] + h, lower[j], upper[j]);
    pm[j] = clampv(p[j] - h, lower[j], upper[j]);
    const double denom = pp[j] - pm[j];
    for (std::size_t i = 0; i < n; ++i)
      jac(i, j) = denom != 0.0 ? (f(x[i], pp) - f(x[i], pm)) / denom : 0.0;
  }
  const double dof = double(n > np ? n - np : 1);
  const double s2 = chi2 / dof;
  Eigen::MatrixXd jtj = jac.transpose() * jac;
  Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse() * s2;
  out.sigmas.resize(np);
  for (std::size_t j = 0; j < np; ++j)
    out.sigmas[j] = cov(j, j) > 0 ? std::sqrt(cov(j, j)) : 0.0;
  return out;
}

StretchedExpFit fit_stretched_exponential(const std::vector<double>& t,
                                          const std::vector<double>& v) {
  if (t.size() < 8) throw FitError("fit_stretched_exponential: need >= 8 points");
  for (double vi : v)
    if (vi < -0.05 || vi > 1.05)
      throw FitError("fit_stretched_exponential: visibility outside [-0.05, 1.05]");

  const double vmax = *std::max_element(v.begin(), v.end());
  const double vmin = *std::min_element(v.begin(), v.end());
  if (vmax - vmin < 1e-4)
    throw FitError("fit_stretched_exponential: constant data, decay time unresolved");

  // seed T2 with the first 1/e crossing
  double t2_seed = t.back();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (v[i] <= vmax / std::exp(1.0)) {
      t2_seed = std::max(t[i], t[1] * 0.5);
      break;
    }
  }
  const double tmax = t.back();
  ModelFn model = [](double x, const std::vector<double>& p) {
    if (x <= 0.0) return p[0];
    return p[0] * std::exp(-std::pow(x / p[1], p[2]));
  };
  auto fit = levenberg_marquardt(model, t, v, {vmax, t2_seed, 1.5},
                                 {0.0, tmax * 1e-4, 0.3}, {2.0, tmax * 1e4, 3.0},
                                 "stretched_exponential");
  if (!fit.converged) throw FitError("fit_stretched_exponential: did not converge");
  StretchedExpFit out;
  out.amplitude = fit.params[0];
  out.t2 = fit.params[1];
  out.alpha = fit.params[2];
  out.t2_sigma = fit.sigmas[1];
  out.alpha_sigma = fit.sigmas[2];
  out.raw = std::move(fit);
  if (out.t2 >= tmax * 1e3)
    throw FitError("fit_stretched_exponential: decay slower than the data window");
  return out;
}

namespace {

// Spectral seed: frequency of the largest DFT bin of the mean-removed
// signal. Throws when the peak does not clear the noise floor.
double spectral_peak_ghz(const std::vector<double>& t, const std::vector<double>& s,
                         double floor_factor) {
  const double dt = t[1] - t[0];
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
  std::vector<double> centered(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) centered[i] = s[i] - mean;
  double df = 0.0;
  auto spec = real_spectrum(centered, dt, &df);
  std::vector<double> mag(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) mag[i] = std::abs(spec[i]);
  mag[0] = 0.0;
  const std::size_t kpeak =
      std::size_t(std::max_element(mag.begin(), mag.end()) - mag.begin());
  std::vector<double> sorted(mag.begin() + 1, mag.end());
  std::sort(sorted.begin(), sorted.end());
  const double floor = sorted[sorted.size() / 2];
  if (mag[kpeak] < floor_factor * std::max(floor, 1e-300))
    throw FitError("fit_damped_oscillation: no oscillation detected");
  // a bare decay envelope concentrates its weight in the first bins; a
  // carrier needs at least three cycles across the window
  if (kpeak < 3)
    throw FitError("fit_damped_oscillation: no carrier above the decay envelope");
  return double(kpeak) * df;
}

}  // namespace

DampedOscillationFit fit_damped_oscillation(const std::vector<double>& t,
                                            const std::vector<double>& s) {
  if (t.size() < 16) throw FitError("fit_damped_oscillation: too few points");
  const double f_seed = spectral_peak_ghz(t, s, 3.0);
  const double tmax = t.back();
  if (f_seed * tmax < 3.0)
    throw FitError("fit_damped_oscillation: fewer than 3 visible periods");

  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
  const double amp_seed =
      0.5 * (*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()));

  // decay-rate parametrization so that lambda -> 0 is an undamped cosine
  ModelFn model = [](double x, const std::vector<double>& p) {
    // p = {f, lambda, amp, offset, phase}
    return p[3] + p[2] * std::exp(-p[1] * x) * std::cos(two_pi * p[0] * x + p[4]);
  };
  std::vector<double> lo = {f_seed * 0.5, 0.0, 0.0, mean - 2.0 * amp_seed, -two_pi};
  std::vector<double> hi = {f_seed * 1.5, 50.0 / tmax, 4.0 * amp_seed,
                            mean + 2.0 * amp_seed, two_pi};
  // multi-start over the carrier phase; anti-phased seeds otherwise stall
  // against the amplitude bound
  FitResult fit;
  bool have = false;
  for (double phase_seed : {0.0, 0.5 * pi, pi, 1.5 * pi}) {
    std::vector<double> p0 = {f_seed, 0.5 / tmax, amp_seed, mean, phase_seed};
    auto trial = levenberg_marquardt(model, t, s, p0, lo, hi, "damped_oscillation");
    if (!trial.converged) continue;
    if (!have || trial.residual_norm < fit.residual_norm) {
      fit = trial;
      have = true;
    }
  }
  if (!have) throw FitError("fit_damped_oscillation: did not converge");

  DampedOscillationFit out;
  out.frequency_ghz = fit.params[0];
  out.amplitude = fit.params[2];
  out.offset = fit.params[3];
  out.phase_rad = fit.params[4];
  const double lambda = fit.params[1];
  if (lambda * tmax < 1e-3) {
    out.t2_unresolved = true;
    out.t2_ns = std::numeric_limits<double>::infinity();
    out.q_factor = std::numeric_limits<double>::infinity();
  } else {
    out.t2_ns = 1.0 / lambda;
    out.q_factor = 2.0 * out.t2_ns * out.frequency_ghz;
  }
  out.raw = std::move(fit);
  return out;
}

ModulatedDecayFit fit_modulated_decay(const std::vector<double>& t,
                                      const std::vector<double>& s) {
  if (t.size() < 16) throw FitError("fit_modulated_decay: too few points");
  const double f_seed = spectral_peak_ghz(t, s, 3.0);
  const double tmax = t.back();
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / double(s.size());
  const double amp_seed =
      0.5 * (*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()));
  ModelFn model = [](double x, const std::vector<double>& p) {
    // p = {f, t2, alpha, amp, offset, phase}
    const double env = x > 0.0 ? std::exp(-std::pow(x / p[1], p[2])) : 1.0;
    return p[4] + p[3] * env * std::cos(two_pi * p[0] * x + p[5]);
  };
  std::vector<double> lo = {f_seed * 0.5, tmax * 1e-3, 0.3, 0.0, mean - 2 * amp_seed,
                            -two_pi};
  std::vector<double> hi = {f_seed * 1.5, tmax * 1e3, 3.0, 4 * amp_seed,
                            mean + 2 * amp_seed, two_pi};
  FitResult fit;
  bool have = false;
  for (double phase_seed : {0.0, 0.5 * pi, pi, 1.5 * pi}) {
    std::vector<double> p0 = {f_seed, 0.5 * tmax, 1.5, amp_seed, mean, phase_seed};
    auto trial = levenberg_marquardt(model, t, s, p0, lo, hi, "modulated_decay");
    if (!trial.converged) continue;
    if (!have || trial.residual_norm < fit.residual_norm) {
      fit = trial;
      have = true;
    }
  }
  if (!have) throw FitError("fit_modulated_decay: did not converge");
  ModulatedDecayFit out;
  out.frequency_ghz = fit.params[0];
  out.t2_ns = fit.params[1];
  out.alpha = fit.params[2];
  out.amplitude = fit.params[3];
  out.offset = fit.params[4];
  out.phase_rad = fit.params[5];
  out.raw = std::move(fit);
  return out;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 4 || x.size() != y.size())
    throw FitError("fit_power_law: need >= 4 matched points");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw FitError("fit_power_law: data must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) throw FitError("fit_power_law: degenerate abscissa");
  PowerLawFit out;
  out.exponent = (double(n) * sxy - sx * sy) / denom;
  const double intercept = (sy - out.exponent * sx) / double(n);
  out.prefactor = std::exp(intercept);
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (intercept + out.exponent * lx[i]);
    ssr += r * r;
  }
  const double dof = n > 2 ? double(n - 2) : 1.0;
  out.exponent_sigma = std::sqrt(ssr / dof * double(n) / denom);
  return out;
}

SpectralDistribution envelope_fft(const std::vector<double>& t,
                                  const std::vector<double>& v) {
  if (t.size() < 4) throw FitError("envelope_fft: too few points");
  const double dt = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::fabs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
      throw FitError("envelope_fft: non-uniform time grid, resample required");

  // Reflect about t = 0: the coherence envelope is even in time, and the
  // two-sided series makes a Gaussian decay transform to a Gaussian line.
  const std::size_t n = t.size();
  std::vector<double> sym(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    sym[n - 1 - i] = v[i];
    sym[n - 1 + i] = v[i];
  }
  const double mean = std::accumulate(sym.begin(), sym.end(), 0.0) / double(sym.size());
  for (auto& s : sym) s -= mean;

  double df = 0.0;
  auto spec = real_spectrum(sym, dt, &df);
  SpectralDistribution out;
  out.bin_ghz = df;
  out.frequency_ghz.resize(spec.size());
  out.amplitude.resize(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    out.frequency_ghz[k] = double(k) * df;
    out.amplitude[k] = std::abs(spec[k]);
  }
  const std::size_t kpeak = std::size_t(
      std::max_element(out.amplitude.begin(), out.amplitude.end()) -
      out.amplitude.begin());
  out.peak_frequency_ghz = out.frequency_ghz[kpeak];

  // Gaussian width of the central feature: fit bins above 20% of the peak.
  std::vector<double> fx, fy;
  const double apeak = out.amplitude[kpeak];
  for (std::size_t k = kpeak; k < out.amplitude.size(); ++k) {
    fx.push_back(out.frequency_ghz[k]);
    fy.push_back(out.amplitude[k]);
    if (out.amplitude[k] < 0.2 * apeak) break;
  }
  for (std::size_t k = kpeak; k-- > 0;) {
    if (out.amplitude[k] < 0.2 * apeak) break;
    fx.insert(fx.begin(), out.frequency_ghz[k]);
    fy.insert(fy.begin(), out.amplitude[k]);
  }
  if (fx.size() >= 4) {
    ModelFn gauss = [](double x, const std::vector<double>& p) {
      const double z = (x - p[1]) / p[2];
      return p[0] * std::exp(-0.5 * z * z);
    };
    const double w_seed = std::max(df * double(fx.size()) / 2.355, df);
    auto fit = levenberg_marquardt(
        gauss, fx, fy, {apeak, out.peak_frequency_ghz, w_seed},
        {0.0, -df * 2.0 + out.peak_frequency_ghz, df * 0.2},
        {2.0 * apeak, out.peak_frequency_ghz + 2.0 * df, df * double(spec.size())},
        "spectral_gaussian");
    out.gaussian_width_ghz = fit.params[2];
  } else {
    out.gaussian_width_ghz = df * double(fx.size()) / 2.355;
  }
  return out;
}

double pi_pulse_fidelity_from_q(double q_factor) {
  if (std::isinf(q_factor)) return 1.0;
  return 0.5 * (1.0 + std::exp(-1.0 / q_factor));
}

}  // namespace qdspin
