#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qdspin/analysis.hpp"
#include "qdspin/nuclear_bath.hpp"
#include "qdspin/numeric.hpp"
#include "qdspin/units.hpp"

using namespace qdspin;

TEST_CASE("default species sit in the expected Larmor band at 2.9 T") {
  for (const auto& sp : default_species()) {
    const double wn_mhz = sp.larmor_ghz(2.9) * 1e3;
    CHECK(wn_mhz > 20.0);
    CHECK(wn_mhz < 50.0);
  }
}

TEST_CASE("sigma and T2* are Fourier-pair consistent") {
  CHECK(sigma_from_t2_star_ghz(28.0) == doctest::Approx(8.04e-3).epsilon(0.002));
  CHECK(sigma_from_t2_star_ghz(535.0) == doctest::Approx(0.4207e-3).epsilon(0.002));
  CHECK(t2_star_from_sigma_ns(sigma_from_t2_star_ghz(28.0)) ==
        doctest::Approx(28.0).epsilon(1e-12));
}

TEST_CASE("overhauser sampling") {
  OverhauserState state;
  state.mean_ghz = 0.003;
  state.sigma_ghz = 0.0;
  Rng rng(2);
  CHECK(sample_overhauser(state, rng) == 0.003);  // sigma = 0 is deterministic

  state.sigma_ghz = 8.04e-3;
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_overhauser(state, rng);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(mean == doctest::Approx(0.003).epsilon(0.05));
  CHECK(sd == doctest::Approx(8.04e-3).epsilon(0.01));
}

TEST_CASE("Monte-Carlo Ramsey decay reproduces the analytic envelope") {
  // quasistatic Gaussian bath at the thermal width; the visibility must
  // follow exp(-(t/T2*)^2) with T2* = sqrt(2)/(2 pi sigma)
  const double sigma = sigma_from_t2_star_ghz(28.0);
  const int shots = 100000;
  std::vector<double> taus, vis;
  double max_dev = 0.0;
  for (double tau = 0.0; tau <= 70.0; tau += 3.5) {
    const double v = oracles::ramsey_visibility_mc(sigma, tau, shots, 77 + int(tau));
    taus.push_back(tau);
    vis.push_back(std::clamp(v, -0.05, 1.05));
    max_dev = std::max(max_dev, std::fabs(v - std::exp(-std::pow(tau / 28.0, 2.0))));
  }
  CHECK(max_dev < 0.02);
  const auto fit = fit_stretched_exponential(taus, vis);
  CHECK(fit.t2 == doctest::Approx(28.0).epsilon(0.03));
  CHECK(fit.alpha == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Hartmann-Hahn mismatch") {
  const auto species = default_species();
  const auto& in115 = species[0];

  SUBCASE("on resonance the mismatch vanishes") {
    const double wn = in115.larmor_ghz(2.9);
    CHECK(hartmann_hahn_mismatch_ghz(wn, 0.0, in115, 2.9) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("zero crossing at the tabulated detuning") {
    // Omega/2pi = 13.6 MHz against In-115 at 2.9 T
    const double omega = 13.6e-3;
    double lo = 0.0, hi = 0.05;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (hartmann_hahn_mismatch_ghz(omega, mid, in115, 2.9) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    CHECK(0.5 * (lo + hi) * 1e3 == doctest::Approx(23.6).epsilon(0.005));
    CHECK(hartmann_hahn_mismatch_ghz(omega, -0.5 * (lo + hi), in115, 2.9) ==
          doctest::Approx(0.0).epsilon(1e-6));
  }
  SUBCASE("mismatch grows monotonically in |delta|") {
    double prev = hartmann_hahn_mismatch_ghz(0.03, 0.0, in115, 2.9);
    for (double d = 0.005; d < 0.3; d += 0.005) {
      const double m = hartmann_hahn_mismatch_ghz(0.03, d, in115, 2.9);
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("rabi Q factor with the bath") {
  SpinSystem sys;
  sys.flip_coefficient = 0.5e-4;
  OverhauserState bath;
  bath.sigma_ghz = sigma_from_t2_star_ghz(28.0);
  const auto species = default_species();

  RabiQOptions opt;
  opt.shots = 1500;
  opt.seed = 5;

  SUBCASE("needs enough shots") {
    RabiQOptions bad = opt;
    bad.shots = 10;
    CHECK_THROWS_AS(rabi_q_factor_with_bath(0.03, bath, sys, species, bad),
                    PhysicsError);
  }

  SUBCASE("flips alone set the closed-form quality factor") {
    // symmetric flip pair at rate r = k Omega: longitudinal 2r, transverse
    // r, so the driven envelope decays at 1.5 r and Q = 2 f / (1.5 r),
    // independent of power
    opt.include_bath = false;
    opt.channel.enabled = false;
    opt.trace_ns = 450.0;
    opt.trace_points = 360;
    const double omega = 0.095;
    const double r = laser_flip_rate_per_ns(omega, sys);
    const double q_expected = 2.0 * omega / (1.5 * r);  // = 2/(1500 k) = 26.7
    CHECK(q_expected == doctest::Approx(26.67).epsilon(1e-3));
    const double q = rabi_q_factor_with_bath(omega, bath, sys, species, opt);
    CHECK(q == doctest::Approx(q_expected).epsilon(0.08));

    // power independence: both Omega and the flip rate scale with power
    const double q_low = rabi_q_factor_with_bath(0.03, bath, sys, species, opt);
    CHECK(std::fabs(q_low - q) / q < 0.05);
  }

  SUBCASE("resonance channel digs dips at the nuclear frequencies") {
    // enable one species; scan across its Larmor frequency
    std::vector<NuclearSpecies> only_in = {default_species()[0]};  // 27.2 MHz
    opt.channel.enabled = true;
    opt.shots = 1200;
    std::vector<double> omegas, qs;
    for (double om = 0.022; om <= 0.033; om += 0.001) {
      omegas.push_back(om);
      qs.push_back(rabi_q_factor_with_bath(om, bath, sys, only_in, opt));
    }
    const std::size_t argmin =
        std::min_element(qs.begin(), qs.end()) - qs.begin();
    const double wn = only_in[0].larmor_ghz(sys.b_field_tesla);
    CHECK(std::fabs(omegas[argmin] - wn) < 2.0 * opt.channel.width_ghz);
    CHECK(argmin > 0);
    CHECK(argmin + 1 < qs.size());  // interior local minimum

    // ablation removes the dip: with the channel off the same window is a
    // smooth trend whose pointwise difference from the on-curve peaks at
    // the resonance
    opt.channel.enabled = false;
    std::vector<double> qs_off;
    for (double om : omegas)
      qs_off.push_back(rabi_q_factor_with_bath(om, bath, sys, only_in, opt));
    double max_depression = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double depression = qs_off[i] - qs[i];
      if (depression > max_depression) {
        max_depression = depression;
        where = i;
      }
    }
    CHECK(max_depression > 5.0);
    CHECK(std::fabs(omegas[where] - wn) < 2.0 * opt.channel.width_ghz);
    // no interior point of the ablated curve is a dip of comparable depth
    for (std::size_t i = 1; i + 1 < qs_off.size(); ++i) {
      const double prominence =
          0.5 * (qs_off[i - 1] + qs_off[i + 1]) - qs_off[i];
      CHECK(prominence < 0.3 * max_depression);
    }
  }
}

TEST_CASE("cooling feedback") {
  CoolingProtocol protocol;

  SUBCASE("zero efficiency leaves the distribution unchanged") {
    protocol.flip_efficiency = 0.0;
    OverhauserState state;
    state.sigma_ghz = 8.04e-3;
    auto traj = run_cooling(protocol, state, 200, 3);
    CHECK(traj.sigma_ghz.back() == doctest::Approx(traj.sigma_ghz.front()).epsilon(0.1));
    CHECK(traj.sigma_ghz.back() == doctest::Approx(8.04e-3).epsilon(0.15));
  }

  SUBCASE("offset above the set point with phase in the first half-turn is pushed down") {
    protocol.flip_efficiency = 1.0;
    Rng rng(1);
    const double x0 = 0.4e-3;  // phase 2 pi x tau well inside (0, pi)
    const double phase = two_pi * x0 * 200.0;
    REQUIRE(phase > 0.0);
    REQUIRE(phase < pi);
    // probability carries |sin|; draw until the flip fires
    double x1 = x0;
    for (int i = 0; i < 64 && x1 == x0; ++i)
      x1 = cooling_feedback_step(x0, phase, protocol, rng);
    CHECK(x1 < x0);
    CHECK(x1 == doctest::Approx(x0 - protocol.flip_step_ghz));
  }

  SUBCASE("default protocol narrows the ensemble monotonically") {
    OverhauserState state;
    state.sigma_ghz = sigma_from_t2_star_ghz(28.0);
    auto traj = run_cooling(protocol, state, 1000, 42);
    // per-cycle sigma across the first full sequence decreases strictly
    std::vector<double> first_pass(traj.sigma_ghz.begin(),
                                   traj.sigma_ghz.begin() + protocol.n_cycles);
    CHECK(spearman_rho(first_pass) < -0.95);
    // long-run narrowing reaches the sideband-resolved regime
    CHECK(traj.sigma_ghz.back() < state.sigma_ghz / 4.0);
    CHECK(traj.phase_wrap_warning);  // thermal width wraps the longest taus

    // cooling does not pull the mean away from the set point
    CHECK(std::fabs(traj.mean_ghz.back() - state.set_point_ghz) <
          std::fabs(traj.mean_ghz.front() - state.set_point_ghz) + 3e-4);
  }

  SUBCASE("narrow start does not warn about phase wrapping") {
    OverhauserState state;
    state.sigma_ghz = 0.05e-3;
    auto traj = run_cooling(protocol, state, 100, 9);
    CHECK_FALSE(traj.phase_wrap_warning);
  }

  SUBCASE("protocol validation") {
    protocol.tau_min_ns = 700.0;  // above tau_max
    CHECK_THROWS_AS(protocol.validate(), PhysicsError);
    protocol.tau_min_ns = 10.0;
    protocol.flip_efficiency = 1.5;
    CHECK_THROWS_AS(protocol.validate(), PhysicsError);
  }
}

TEST_CASE("heating delay probe") {
  OverhauserState cooled;
  cooled.sigma_ghz = 0.42e-3;
  const double thermal = 8.04e-3;

  SUBCASE("default: no re-thermalization out to 1 ms") {
    const auto out = heating_delay_probe(cooled, thermal, 1e6, 0.0);
    CHECK(out.sigma_ghz == cooled.sigma_ghz);
  }
  SUBCASE("zero delay is the identity") {
    const auto out = heating_delay_probe(cooled, thermal, 0.0, 1e6);
    CHECK(out.sigma_ghz == cooled.sigma_ghz);
  }
  SUBCASE("one heating time constant moves 63.2% of the gap") {
    const auto out = heating_delay_probe(cooled, thermal, 1e6, 1e6);
    const double expected =
        cooled.sigma_ghz + (thermal - cooled.sigma_ghz) * (1.0 - std::exp(-1.0));
    CHECK(out.sigma_ghz == doctest::Approx(expected).epsilon(1e-12));
  }
}
