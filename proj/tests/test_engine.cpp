#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>

#include "qdspin/analysis.hpp"
#include "qdspin/builtins.hpp"
#include "qdspin/engine.hpp"
#include "qdspin/io.hpp"
#include "qdspin/units.hpp"

using namespace qdspin;

namespace {

World quiet_world() {
  World w = default_world();
  w.bath.sigma_ghz = 0.0;
  w.flips_enabled = false;
  w.t1_enabled = false;
  w.hh_damping_enabled = false;
  return w;
}

double snap_ns(double t) { return std::round(t * 1024.0) / 1024.0; }

double total_duration(const std::vector<PulseElement>& elements) {
  double t = 0.0;
  for (const auto& el : elements) t += el.duration_ns;
  return t;
}

}  // namespace

TEST_CASE("noiseless pi pulse reads out the full signal, bit-reproducibly") {
  const World w = quiet_world();
  const auto seq = parse_sequence(
      "init 30ns\n"
      "raman omega=95MHz delta=0 phase=0 t=5.2631578947368425ns\n"
      "readout 90ns\n");
  const auto a = run_experiment(seq, w, 1, 7);
  const auto b = run_experiment(seq, w, 1, 7);
  REQUIRE(a.n_points() == 1);
  CHECK(a.mean[0] == b.mean[0]);  // determinism, bit level
  CHECK(a.mean[0] == doctest::Approx(w.readout.detection_scale).epsilon(1e-9));
}

TEST_CASE("determinism across identical runs") {
  World w = default_world();
  const auto seq = build_experiment("ramsey", w);
  const auto a = run_experiment(seq, w, 200, 42);
  const auto b = run_experiment(seq, w, 200, 42);
  REQUIRE(a.mean.size() == b.mean.size());
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    CHECK(a.mean[i] == b.mean[i]);
    CHECK(a.stderr_of_mean[i] == b.stderr_of_mean[i]);
  }
  const auto c = run_experiment(seq, w, 200, 43);
  bool any_different = false;
  for (std::size_t i = 0; i < a.mean.size(); ++i)
    if (a.mean[i] != c.mean[i]) any_different = true;
  CHECK(any_different);  // the seed actually matters
}

TEST_CASE("standard error shrinks with the square root of the shot count") {
  World w = default_world();
  const auto seq = build_experiment("ramsey", w);
  const auto few = run_experiment(seq, w, 100, 5);
  const auto many = run_experiment(seq, w, 400, 5);
  double ratio = 0.0;
  int cnt = 0;
  for (std::size_t i = 0; i < few.mean.size(); ++i) {
    if (many.stderr_of_mean[i] <= 0.0) continue;
    ratio += few.stderr_of_mean[i] / many.stderr_of_mean[i];
    ++cnt;
  }
  ratio /= cnt;
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("Ramsey fringe oscillates at the drive detuning") {
  World w = default_world();
  w.drive_delta_ghz = 0.030;  // 30 MHz
  auto seq = build_experiment("ramsey", w);
  const auto res = run_experiment(seq, w, 4000, 11);
  std::vector<double> taus(res.n_points()), signal(res.mean);
  for (std::size_t i = 0; i < res.n_points(); ++i) taus[i] = res.axis_at(0, i);
  const auto fit = fit_modulated_decay(taus, signal);
  CHECK(fit.frequency_ghz == doctest::Approx(0.030).epsilon(0.005));
}

TEST_CASE("two-pulse phase sweep is pi-periodic in the microwave phase") {
  const World w = quiet_world();
  const auto seq = build_experiment("phase_sweep", w);
  const auto res = run_experiment(seq, w, 1, 3);
  const std::size_t n = res.n_points();
  // grid covers [0, 2pi] inclusive with 101 points: half-period shift = 50
  for (std::size_t i = 0; i + 50 < n; ++i)
    CHECK(res.mean[i] == doctest::Approx(res.mean[i + 50]).epsilon(1e-6));
  // peaks where the two pulses add to a pi rotation
  CHECK(res.mean[0] == doctest::Approx(w.readout.detection_scale).epsilon(1e-6));
  CHECK(res.mean[25] == doctest::Approx(0.0).scale(w.readout.detection_scale).epsilon(1e-6));
}

TEST_CASE("interleaved Ramsey keeps the average z projection at zero") {
  World w = default_world();
  const auto seq = build_experiment("ramsey", w);
  REQUIRE(seq.interleave);
  const auto res = run_experiment(seq, w, 400, 21);
  double mean_z = 0.0;
  for (double z : res.mean_readout_z) mean_z += z;
  mean_z /= double(res.mean_readout_z.size());
  CHECK(std::fabs(mean_z) < 0.02);

  // without the alternation the spin is handed to the readout polarized
  PulseSequence plain = seq;
  plain.interleave = false;
  const auto res_plain = run_experiment(plain, w, 400, 21);
  double mean_z_plain = 0.0;
  for (double z : res_plain.mean_readout_z) mean_z_plain += z;
  mean_z_plain /= double(res_plain.mean_readout_z.size());
  CHECK(mean_z_plain > 0.1);
}

TEST_CASE("hahn builder keeps the wall time constant across the sweep") {
  World w = default_world();
  const auto seq = build_experiment("hahn", w);
  const double t0 = total_duration(seq.materialize(0));
  for (std::size_t p = 1; p < seq.n_points(); ++p)
    CHECK(total_duration(seq.materialize(p)) == t0);  // exact equality
  // echo time is split symmetrically around the refocusing pulse
  const auto mid = seq.materialize(seq.n_points() / 2);
  double w1 = 0.0, w2 = 0.0;
  int seen = 0;
  for (const auto& el : mid)
    if (el.kind == ElementKind::Wait) {
      if (seen == 0) w1 = el.duration_ns;
      if (seen == 1) w2 = el.duration_ns;
      ++seen;
    }
  CHECK(w1 == doctest::Approx(w2));
}

TEST_CASE("cpmg builder uses y-phased refocusing pulses") {
  World w = default_world();
  const auto seq = build_cpmg(w, 4);
  int pi_pulses = 0;
  const double t_pi = snap_ns(0.5 / spin_rabi_frequency_ghz(w.raman, w.cavity));
  for (const auto& el : seq.elements) {
    if (el.kind != ElementKind::Raman) continue;
    if (std::fabs(el.duration_ns - t_pi) < 1e-12) {
      ++pi_pulses;
      // qubit-frame pi/2 phase, i.e. a microwave phase of pi/4
      CHECK(el.phase_rad == doctest::Approx(0.5 * pi));
    }
  }
  CHECK(pi_pulses == 4);
  const double t0 = total_duration(seq.materialize(0));
  for (std::size_t p = 1; p < seq.n_points(); ++p)
    CHECK(total_duration(seq.materialize(p)) == doctest::Approx(t0).epsilon(1e-12));
}

TEST_CASE("t1 builtin structure") {
  World w = default_world();
  const auto seq = build_experiment("t1", w);
  REQUIRE(seq.elements.size() == 4);
  CHECK(seq.elements[0].kind == ElementKind::Init);
  CHECK(seq.elements[1].kind == ElementKind::Raman);
  CHECK(seq.elements[1].duration_ns ==
        doctest::Approx(snap_ns(0.5 / spin_rabi_frequency_ghz(w.raman, w.cavity))));
  CHECK(seq.elements[2].kind == ElementKind::Wait);
  CHECK(seq.elements[3].kind == ElementKind::Readout);
  REQUIRE(seq.sweeps.size() == 1);
  CHECK(seq.sweeps[0].bindings[0].element_index == 2);
}

TEST_CASE("t1 relaxation is recovered by the engine") {
  World w = default_world();
  w.bath.sigma_ghz = 0.0;
  w.flips_enabled = false;
  auto seq = build_experiment("t1", w);
  const auto res = run_experiment(seq, w, 1, 2);
  std::vector<double> t(res.n_points()), p_up(res.n_points());
  for (std::size_t i = 0; i < res.n_points(); ++i) {
    t[i] = res.axis_at(0, i);
    p_up[i] = res.mean[i] / w.readout.detection_scale;
  }
  // exponential toward 1/2 with the configured T1
  double tau_fit = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (p_up[i] - 0.5 <= 0.5 * std::exp(-1.0)) {
      tau_fit = t[i];
      break;
    }
  CHECK(tau_fit == doctest::Approx(21e3).epsilon(0.06));
}

TEST_CASE("cooling_ramsey builtin carries the protocol defaults") {
  World w = default_world();
  CHECK(w.protocol.n_cycles == 35);
  CHECK(w.protocol.tau_min_ns == 10.0);
  CHECK(w.protocol.tau_max_ns == 600.0);
  CHECK(w.protocol.drive_duration_ns == 60.0);
  CHECK(w.protocol.drive_omega_ghz == doctest::Approx(26e-3));
  CHECK(w.protocol.readout_ns == 90.0);
  const auto seq = build_experiment("cooling_ramsey", w);
  CHECK(seq.elements[0].kind == ElementKind::Cool);
  REQUIRE(seq.sweeps.size() == 1);
  // tau-dependent phase on the second pi/2 pulse adds a 10 MHz carrier
  bool found_modulation = false;
  for (const auto& b : seq.sweeps[0].bindings)
    if (b.param == "phase" && std::fabs(b.scale - two_pi * 0.010) < 1e-12)
      found_modulation = true;
  CHECK(found_modulation);
}

TEST_CASE("builtin table enumerates the experiment suite") {
  const auto& table = builtin_experiments_table();
  CHECK(table.size() == 11);
  for (const char* name :
       {"rabi", "chevron", "ramsey", "hahn", "cpmg", "t1", "hh_scan",
        "cooling_ramsey", "cooled_chevron", "phase_sweep", "init_fidelity"})
    CHECK(is_builtin_experiment(name));
  CHECK_FALSE(is_builtin_experiment("spin_echo_triple"));
  CHECK_THROWS_AS(build_experiment("nope", default_world()), PhysicsError);
}

TEST_CASE("sweep metadata survives a CSV round trip") {
  World w = default_world();
  auto seq = build_experiment("chevron", w);
  // small grid for speed
  seq.sweeps[0].values = {-0.1, 0.0, 0.1};
  seq.sweeps[1].values = {0.0, 5.0, 10.0, 15.0};
  auto res = run_experiment(seq, w, 5, 7);
  res.config_hash = "deadbeef00000000";
  const std::string path = "/tmp/qdspin_roundtrip.csv";
  write_result_csv(res, path);
  const auto back = read_result_csv(path);
  CHECK(back.experiment == res.experiment);
  CHECK(back.seed == res.seed);
  CHECK(back.config_hash == res.config_hash);
  REQUIRE(back.axis_names.size() == 2);
  CHECK(back.axis_names[0] == "delta_GHz");
  CHECK(back.axis_names[1] == "t_ns");
  REQUIRE(back.axis_grids[0].size() == 3);
  REQUIRE(back.axis_grids[1].size() == 4);
  CHECK(back.mean.size() == res.mean.size());
  for (std::size_t i = 0; i < res.mean.size(); ++i)
    CHECK(back.mean[i] == doctest::Approx(res.mean[i]).epsilon(1e-9));
}

TEST_CASE("cooled chevron suppresses the off-resonant background modulation") {
  World w = default_world();
  auto make_mini = [&](bool cooled) {
    auto seq = build_experiment(cooled ? "cooled_chevron" : "chevron", w);
    auto& delta_axis = seq.sweeps[0];
    delta_axis.values.clear();
    for (double d = -0.20; d <= 0.201; d += 0.02) delta_axis.values.push_back(d);
    auto& t_axis = seq.sweeps[1];
    t_axis.values.clear();
    for (double t = 5.0; t <= 95.0; t += 10.0) t_axis.values.push_back(t);
    return seq;
  };
  auto strip_shot_variance = [&](const ExperimentResult& res, std::size_t n_delta,
                                 std::size_t n_t, int shots) {
    // per-pixel shot variance over the far-detuned strip: this is the
    // point-to-point background speckle at a fixed acquisition budget
    double var = 0.0;
    int cnt = 0;
    for (std::size_t j = 0; j < n_t; ++j) {
      for (std::size_t i = 0; i < n_delta; ++i) {
        const double delta = -0.20 + 0.02 * double(i);
        if (std::fabs(delta) < 0.15) continue;
        const double se = res.stderr_of_mean[i * n_t + j];
        var += se * se * double(shots);
        ++cnt;
      }
    }
    return var / cnt;
  };
  const int shots = 150;
  const auto thermal = run_experiment(make_mini(false), w, shots, 3);
  const auto cooled = run_experiment(make_mini(true), w, shots, 3);
  const double v_thermal = strip_shot_variance(thermal, 21, 10, shots);
  const double v_cooled = strip_shot_variance(cooled, 21, 10, shots);
  CHECK(v_thermal / v_cooled >= 5.0);
}
