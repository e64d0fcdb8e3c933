#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qdspin/dynamics.hpp"
#include "qdspin/lindblad.hpp"
#include "qdspin/rng.hpp"
#include "qdspin/units.hpp"

using namespace qdspin;

namespace {

Eigen::MatrixXcd sigma_plus() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(1, 0) = 1.0;  // |up><down|
  return m;
}
Eigen::MatrixXcd sigma_minus() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("zero dissipation matches the exact rotation") {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const double omega = 0.02 + 0.2 * rng.uniform();
    const double delta = 0.2 * (rng.uniform() - 0.5);
    const double phase = two_pi * rng.uniform();
    const double t = 40.0 * rng.uniform();
    Eigen::MatrixXcd h =
        pi * omega *
            (std::cos(phase) * pauli_x() + std::sin(phase) * pauli_y()) +
        pi * delta * pauli_z();
    QuantumState s0 = QuantumState::pure(2, 0);
    const auto via_lindblad = evolve_lindblad(s0, h, {}, t, {1e-10, 1e-14});
    const auto exact = evolve_two_level_rwa(s0, omega, delta, phase, t);
    CHECK((via_lindblad.rho() - exact.rho()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("T1 dissipator relaxes with the configured time constant") {
  const double t1_ns = 21e3;
  const double r = 1.0 / (2.0 * t1_ns);
  std::vector<Dissipator> diss = {{r, sigma_plus()}, {r, sigma_minus()}};
  QuantumState up = QuantumState::pure(2, 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);

  // population decays to the symmetric thermal value 1/2; extract the time
  // constant from two samples of the exponential
  const double t_a = 10e3, t_b = 30e3;
  const double pa = evolve_lindblad(up, h, diss, t_a).population(1);
  const double pb = evolve_lindblad(up, h, diss, t_b).population(1);
  const double tau = (t_b - t_a) / std::log((pa - 0.5) / (pb - 0.5));
  CHECK(tau == doctest::Approx(t1_ns).epsilon(0.01));
}

TEST_CASE("optical pumping empties the bright state monotonically") {
  // drive |up> <-> trion with 1:1 branching, start in |up>
  const double w = two_pi * 0.6;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
  h(1, 2) = 0.5 * w;
  h(2, 1) = 0.5 * w;
  Eigen::MatrixXcd to_bright = Eigen::MatrixXcd::Zero(3, 3);
  to_bright(1, 2) = 1.0;
  Eigen::MatrixXcd to_dark = Eigen::MatrixXcd::Zero(3, 3);
  to_dark(0, 2) = 1.0;
  std::vector<Dissipator> diss = {{10.0, to_bright}, {10.0, to_dark}};

  QuantumState s = QuantumState::pure(3, 1);
  std::vector<double> p_dark;
  std::vector<double> times;
  double next = 0.0;
  LindbladOptions opt;
  opt.max_dt_ns = 0.05;
  evolve_lindblad(s, h, diss, 30.0, opt, [&](double t, const Eigen::MatrixXcd& rho) {
    if (t >= next) {
      times.push_back(t);
      p_dark.push_back(rho(0, 0).real());
      next += 0.25;
    }
  });
  CHECK(p_dark.back() > 0.999);
  // monotone after the coherent transient settles
  for (std::size_t i = 1; i < p_dark.size(); ++i)
    if (times[i] > 2.0 && times[i - 1] > 2.0) CHECK(p_dark[i] >= p_dark[i - 1] - 1e-9);

  // classical rate-equation oracle agrees on the pumping time constant
  const auto oracle = oracles::rate_equation_pumping(0.6, 10.0, 10.0, 30.0);
  double sim_tau = 0.0;
  for (std::size_t i = 0; i < p_dark.size(); ++i)
    if (p_dark[i] >= 1.0 - std::exp(-1.0)) {
      sim_tau = times[i];
      break;
    }
  CHECK(sim_tau == doctest::Approx(oracle.time_constant_ns).epsilon(0.2));
}

TEST_CASE("state validity is preserved by generic evolution") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Random(4, 4);
    h = (h + h.adjoint()).eval();
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Random(4, 4);
    std::vector<Dissipator> diss = {{0.05 * rng.uniform(), l}};
    QuantumState s = QuantumState::pure(4, trial % 4);
    const auto out = evolve_lindblad(s, h, diss, 20.0, {1e-9, 1e-13});
    CHECK_NOTHROW(out.check_valid(1e-9));
    CHECK(std::abs(out.rho().trace().real() - 1.0) < 1e-9);
  }
}

TEST_CASE("negative dissipator rate is rejected") {
  QuantumState s = QuantumState::pure(2, 0);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  std::vector<Dissipator> diss = {{-0.1, sigma_plus()}};
  CHECK_THROWS_AS(evolve_lindblad(s, h, diss, 1.0), std::invalid_argument);
}

TEST_CASE("damped Bloch propagation matches the master equation") {
  const double omega = 0.095, delta = 0.02, phase = 0.7;
  const double g_flip = 4.75e-3, t1_ns = 21e3;
  Eigen::MatrixXcd h =
      pi * omega * (std::cos(phase) * pauli_x() + std::sin(phase) * pauli_y()) +
      pi * delta * pauli_z();
  const double r_t1 = 1.0 / (2.0 * t1_ns);
  std::vector<Dissipator> diss = {{g_flip + r_t1, sigma_plus()},
                                  {g_flip + r_t1, sigma_minus()}};
  QuantumState s0 = QuantumState::pure(2, 0);

  for (double t : {3.7, 57.0, 211.0}) {
    const auto me = evolve_lindblad(s0, h, diss, t, {1e-10, 1e-14});
    const Eigen::Vector3d direct = evolve_bloch_damped(
        s0.bloch(), omega, delta, phase, t, g_flip, 1.0 / t1_ns, 0.0);
    const BlochPropagator prop(omega, delta, phase, g_flip, 1.0 / t1_ns, 0.0);
    const Eigen::Vector3d via_prop = prop.at(s0.bloch(), t);
    CHECK((me.bloch() - direct).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((me.bloch() - via_prop).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("Strang fast path agrees with the exact exponential") {
  const Eigen::Vector3d v0(0.3, -0.5, 0.6);
  const double omega = 0.2, delta = -0.05, phase = 1.1;
  const double g_flip = 2e-5, g_t1 = 4.76e-5;
  const double t = 9.0;  // g_long * t ~ 8e-4 keeps the split branch
  const Eigen::Vector3d fast =
      evolve_bloch_damped(v0, omega, delta, phase, t, g_flip, g_t1, 0.0);
  const BlochPropagator exact(omega, delta, phase, g_flip, g_t1, 0.0);
  CHECK((fast - exact.at(v0, t)).cwiseAbs().maxCoeff() < 5e-4);
  // engine-typical short pulse with T1 only: split error is negligible
  const Eigen::Vector3d p2 = evolve_bloch_damped(v0, 0.095, 0.0, 0.0, 2.63, 0.0, 4.76e-5, 0.0);
  const BlochPropagator exact2(0.095, 0.0, 0.0, 0.0, 4.76e-5, 0.0);
  CHECK((p2 - exact2.at(v0, 2.63)).cwiseAbs().maxCoeff() < 5e-5);
}
