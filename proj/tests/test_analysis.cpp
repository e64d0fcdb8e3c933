#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qdspin/analysis.hpp"
#include "qdspin/rng.hpp"
#include "qdspin/units.hpp"

using namespace qdspin;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
  return v;
}

}  // namespace

TEST_CASE("stretched exponential recovers the cooled decay") {
  const auto t = grid(0.0, 1600.0, 64);
  Rng rng(3);
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double clean = std::exp(-std::pow(t[i] / 535.0, 1.15));
    v[i] = std::clamp(clean + rng.gaussian(0.0, 0.005), -0.05, 1.05);
  }
  const auto fit = fit_stretched_exponential(t, v);
  CHECK(fit.t2 == doctest::Approx(535.0).epsilon(0.02));
  CHECK(fit.alpha == doctest::Approx(1.15).epsilon(0.05 / 1.15));
}

TEST_CASE("stretched exponential identifies a Gaussian decay") {
  const auto t = grid(0.0, 90.0, 46);
  std::vector<double> v(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    v[i] = std::exp(-std::pow(t[i] / 28.0, 2.0));
  const auto fit = fit_stretched_exponential(t, v);
  CHECK(fit.alpha == doctest::Approx(2.0).epsilon(0.03 / 2.0));
  CHECK(fit.t2 == doctest::Approx(28.0).epsilon(0.01));
}

TEST_CASE("stretched exponential rejects degenerate input") {
  const auto t = grid(0.0, 100.0, 32);
  std::vector<double> flat(t.size(), 0.8);
  CHECK_THROWS_AS(fit_stretched_exponential(t, flat), FitError);
  CHECK_THROWS_AS(fit_stretched_exponential(grid(0, 1, 4), std::vector<double>(4, 0.5)),
                  FitError);
}

TEST_CASE("damped oscillation fit reproduces Q = 35") {
  // f = 95 MHz, T2 = 184.2 ns so that Q = 2 T2 f = 35
  const double f = 0.095, t2 = 35.0 / (2.0 * f);
  const auto t = grid(0.0, 400.0, 400);
  Rng rng(7);
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    s[i] = 0.5 - 0.5 * std::exp(-t[i] / t2) * std::cos(two_pi * f * t[i]) +
           rng.gaussian(0.0, 0.004);
  const auto fit = fit_damped_oscillation(t, s);
  CHECK(fit.frequency_ghz == doctest::Approx(f).epsilon(0.002));
  CHECK(fit.q_factor == doctest::Approx(35.0).epsilon(1.0 / 35.0));
}

TEST_CASE("undamped cosine flags an unresolved decay time") {
  const auto t = grid(0.0, 300.0, 300);
  std::vector<double> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    s[i] = 0.5 + 0.4 * std::cos(two_pi * 0.05 * t[i] + 0.3);
  const auto fit = fit_damped_oscillation(t, s);
  CHECK(fit.t2_unresolved);
  CHECK(std::isinf(fit.q_factor));
  CHECK(pi_pulse_fidelity_from_q(fit.q_factor) == 1.0);
}

TEST_CASE("no-oscillation input is rejected") {
  const auto t = grid(0.0, 300.0, 256);
  Rng rng(19);
  std::vector<double> s(t.size());
  for (auto& v : s) v = rng.gaussian(0.5, 0.001);
  CHECK_THROWS_AS(fit_damped_oscillation(t, s), FitError);
}

TEST_CASE("q factor is invariant under amplitude rescaling") {
  const auto t = grid(0.0, 400.0, 400);
  std::vector<double> s(t.size()), s10(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    s[i] = 0.5 - 0.5 * std::exp(-t[i] / 150.0) * std::cos(two_pi * 0.08 * t[i]);
    s10[i] = 10.0 * s[i];
  }
  const auto a = fit_damped_oscillation(t, s);
  const auto b = fit_damped_oscillation(t, s10);
  CHECK(a.q_factor == doctest::Approx(b.q_factor).epsilon(1e-6));
}

TEST_CASE("power law fit") {
  SUBCASE("exact cube") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0};
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * x[i] * x[i];
    const auto fit = fit_power_law(x, y);
    CHECK(fit.exponent == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.exponent_sigma < 1e-6);
    CHECK(fit.prefactor == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("scale invariance of the exponent") {
    std::vector<double> x = {1.0, 2.0, 4.0, 8.0, 16.0};
    std::vector<double> y = {2.0, 1.1, 0.52, 0.26, 0.128};
    const auto a = fit_power_law(x, y);
    auto y_scaled = y;
    for (auto& v : y_scaled) v *= 137.0;
    const auto b = fit_power_law(x, y_scaled);
    CHECK(a.exponent == doctest::Approx(b.exponent).epsilon(1e-12));
  }
  SUBCASE("rejects non-positive data") {
    CHECK_THROWS_AS(fit_power_law({1, 2, 3, 4}, {1, -2, 3, 4}), FitError);
    CHECK_THROWS_AS(fit_power_law({1, 2}, {1, 2}), FitError);
  }
}

TEST_CASE("envelope fft widths are the Fourier pairs of the decay times") {
  SUBCASE("thermal envelope, 28 ns") {
    const auto t = grid(0.0, 120.0, 481);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      v[i] = std::exp(-std::pow(t[i] / 28.0, 2.0));
    const auto spec = envelope_fft(t, v);
    const double expected = 1.0 / (std::sqrt(2.0) * pi * 28.0);  // 8.04 MHz
    CHECK(spec.gaussian_width_ghz == doctest::Approx(expected).epsilon(0.05));
    CHECK(spec.gaussian_width_ghz == doctest::Approx(8.0e-3).epsilon(0.05));
  }
  SUBCASE("cooled envelope, 535 ns, and the width ratio") {
    const auto t = grid(0.0, 2200.0, 1101);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      v[i] = std::exp(-std::pow(t[i] / 535.0, 2.0));
    const auto spec = envelope_fft(t, v);
    CHECK(spec.gaussian_width_ghz == doctest::Approx(0.42e-3).epsilon(0.06));
    CHECK(8.04e-3 / spec.gaussian_width_ghz > 15.0);
  }
  SUBCASE("pure cosine peaks at its frequency") {
    const auto t = grid(0.0, 1000.0, 1000);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) v[i] = std::cos(two_pi * 0.010 * t[i]);
    const auto spec = envelope_fft(t, v);
    CHECK(std::fabs(spec.peak_frequency_ghz - 0.010) <= spec.bin_ghz);
  }
  SUBCASE("non-uniform grid is rejected") {
    std::vector<double> t = {0.0, 1.0, 2.5, 3.0, 4.0, 5.0};
    std::vector<double> v = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
    CHECK_THROWS_AS(envelope_fft(t, v), FitError);
  }
}

TEST_CASE("fitters recover their own generators") {
  // parameters drawn from documented ranges, 1% noise, assert 3 sigma
  Rng rng(101);
  int ok = 0, trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const double t2 = 50.0 + 800.0 * rng.uniform();
    const double alpha = 0.6 + 1.8 * rng.uniform();
    const double amp = 0.7 + 0.3 * rng.uniform();
    const auto t = grid(0.0, 3.0 * t2, 60);
    std::vector<double> v(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double clean = amp * std::exp(-std::pow(t[i] / t2, alpha));
      v[i] = std::clamp(clean + rng.gaussian(0.0, 0.01), -0.05, 1.05);
    }
    try {
      const auto fit = fit_stretched_exponential(t, v);
      const bool t2_ok = std::fabs(fit.t2 - t2) < 3.0 * std::max(fit.t2_sigma, 1e-3 * t2);
      const bool a_ok =
          std::fabs(fit.alpha - alpha) < 3.0 * std::max(fit.alpha_sigma, 1e-3);
      if (t2_ok && a_ok) ++ok;
    } catch (const FitError&) {
    }
  }
  CHECK(ok >= int(0.95 * trials));

  ok = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const double f = 0.02 + 0.1 * rng.uniform();
    const double t2 = 100.0 + 400.0 * rng.uniform();
    const auto t = grid(0.0, 600.0, 512);
    std::vector<double> s(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      s[i] = 0.5 - 0.45 * std::exp(-t[i] / t2) * std::cos(two_pi * f * t[i]) +
             rng.gaussian(0.0, 0.005);
    try {
      const auto fit = fit_damped_oscillation(t, s);
      if (std::fabs(fit.frequency_ghz - f) < 0.01 * f &&
          std::fabs(fit.t2_ns - t2) < 0.15 * t2)
        ++ok;
    } catch (const FitError&) {
    }
  }
  CHECK(ok >= int(0.95 * trials));
}
