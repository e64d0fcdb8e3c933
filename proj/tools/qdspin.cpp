// Batch front door: run built-in or file-defined experiments against a
// config, emit plot-ready CSV tables, fit summaries and a run manifest.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qdspin/analysis.hpp"
#include "qdspin/builtins.hpp"
#include "qdspin/config.hpp"
#include "qdspin/io.hpp"
#include "qdspin/numeric.hpp"
#include "qdspin/sequence.hpp"

namespace fs = std::filesystem;
using namespace qdspin;

namespace {

[[noreturn]] void fail(int code, const std::string& context) {
  std::cerr << "ERROR " << code << " " << context << std::endl;
  std::exit(code);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void fit_summary_for(const std::string& name, const ExperimentResult& res,
                     const World& world, std::ostream& out) {
  // Normalized signal in [-1, 1] against the first axis.
  const std::size_t n = res.n_points();
  if (res.axis_grids.size() != 1) {
    out << "experiment: " << name << "\n";
    double lo = res.mean[0], hi = res.mean[0];
    for (double m : res.mean) {
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    out << "points: " << n << "\nsignal_min: " << lo << "\nsignal_max: " << hi << "\n";
    return;
  }
  std::vector<double> x(n), y(n), norm(n);
  const double scale = world.readout.detection_scale;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = res.axis_at(0, i);
    y[i] = res.mean[i];
    norm[i] = std::clamp(2.0 * res.mean[i] / scale - 1.0, -1.05, 1.05);
  }
  out << "experiment: " << name << "\n";
  if (name == "rabi") {
    auto fit = fit_damped_oscillation(x, y);
    out << "rabi_frequency_MHz: " << fit.frequency_ghz * 1e3 << "\n";
    out << "t2_rabi_ns: " << fit.t2_ns << "\n";
    out << "q_factor: " << fit.q_factor << "\n";
    out << "pi_pulse_fidelity: " << pi_pulse_fidelity_from_q(fit.q_factor) << "\n";
  } else if (name == "ramsey" || name == "cooling_ramsey") {
    try {
      auto fit = fit_modulated_decay(x, y);
      out << "fringe_frequency_MHz: " << fit.frequency_ghz * 1e3 << "\n";
      out << "t2_star_ns: " << fit.t2_ns << "\n";
      out << "alpha: " << fit.alpha << "\n";
    } catch (const FitError&) {
      // no carrier: fit the bare envelope
      std::vector<double> vis(n);
      for (std::size_t i = 0; i < n; ++i) vis[i] = std::clamp(norm[i], -0.05, 1.05);
      auto fit = fit_stretched_exponential(x, vis);
      out << "t2_star_ns: " << fit.t2 << "\n";
      out << "alpha: " << fit.alpha << "\n";
    }
  } else if (name == "hahn" || name == "cpmg" || name == "t1") {
    std::vector<double> vis(n);
    for (std::size_t i = 0; i < n; ++i) vis[i] = std::clamp(norm[i], -0.05, 1.05);
    auto fit = fit_stretched_exponential(x, vis);
    out << "t2_ns: " << fit.t2 << "\n";
    out << "alpha: " << fit.alpha << "\n";
  } else if (name == "phase_sweep") {
    // peak spacing should be pi in the microwave phase
    std::size_t k1 = 0, k2 = 0;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (y[i] > y[k1]) k1 = i;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (std::fabs(x[i] - x[k1]) > 1.0 && y[i] > y[k2]) k2 = i;
    out << "peak_spacing_rad: " << std::fabs(x[k2] - x[k1]) << "\n";
  } else {
    out << "points: " << n << "\n";
  }
}

struct RunArgs {
  std::string config_path;
  std::string experiment;
  std::string sequence_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  uint64_t seed = 0;
  int shots = 0;
  int threads = 0;
};

int run_single(const std::string& name, const World& world, const PulseSequence& seq,
               const RunArgs& args, const std::string& hash,
               std::vector<std::string>& outputs) {
  const int shots = args.shots > 0 ? args.shots
                                   : (seq.shots > 0 ? seq.shots : world.default_shots);
  ExperimentResult res = run_experiment(seq, world, shots, args.seed);
  res.experiment = name;
  res.config_hash = hash;
  const std::string csv_path = (fs::path(args.out_dir) / (name + ".csv")).string();
  write_result_csv(res, csv_path);
  outputs.push_back(csv_path);

  const std::string fit_path = (fs::path(args.out_dir) / (name + ".fit.txt")).string();
  std::ofstream fit_out(fit_path, std::ios::binary);
  try {
    fit_summary_for(name, res, world, fit_out);
  } catch (const FitError& e) {
    fit_out << "fit_error: " << e.what() << "\n";
    outputs.push_back(fit_path);
    return 4;
  }
  outputs.push_back(fit_path);
  return 0;
}

// Hahn/CPMG visibility from the filter-function route: the echo curves
// probe pure dephasing (the sequences keep the init-to-readout spacing
// fixed, so relaxation divides out of the normalized visibility).
int run_coherence_curve(const std::string& name, const World& world,
                        const RunArgs& args, const std::string& hash,
                        std::vector<std::string>& outputs) {
  const std::vector<int> pulse_counts =
      name == "hahn" ? std::vector<int>{1} : std::vector<int>{1, 2, 4, 8, 16};
  ExperimentResult res;
  res.experiment = name;
  res.config_hash = hash;
  res.seed = args.seed;
  res.shots = 0;
  std::vector<double> t_grid;
  for (int i = 0; i < 40; ++i)
    t_grid.push_back(2e3 * std::pow(60e3 / 2e3, double(i) / 39.0));
  if (pulse_counts.size() > 1) {
    res.axis_names = {"n_pulses", "T_ns"};
    res.axis_grids = {{}, t_grid};
    for (int n : pulse_counts) res.axis_grids[0].push_back(double(n));
  } else {
    res.axis_names = {"T_ns"};
    res.axis_grids = {t_grid};
  }
  for (int n : pulse_counts) {
    for (double t : t_grid) {
      res.mean.push_back(coherence_from_filter_function(n, world.noise, t));
      res.stderr_of_mean.push_back(0.0);
      res.mean_readout_z.push_back(0.0);
    }
  }
  const std::string csv_path = (fs::path(args.out_dir) / (name + ".csv")).string();
  write_result_csv(res, csv_path);
  outputs.push_back(csv_path);

  const std::string fit_path = (fs::path(args.out_dir) / (name + ".fit.txt")).string();
  std::ofstream fit_out(fit_path, std::ios::binary);
  fit_out << "experiment: " << name << "\n";
  std::vector<double> n_axis, t2_axis;
  for (std::size_t k = 0; k < pulse_counts.size(); ++k) {
    std::vector<double> vis(res.mean.begin() + k * t_grid.size(),
                            res.mean.begin() + (k + 1) * t_grid.size());
    try {
      const auto fit = fit_stretched_exponential(t_grid, vis);
      fit_out << "n" << pulse_counts[k] << "_t2_us: " << fit.t2 * 1e-3 << "\n";
      fit_out << "n" << pulse_counts[k] << "_alpha: " << fit.alpha << "\n";
      n_axis.push_back(double(pulse_counts[k]));
      t2_axis.push_back(fit.t2);
    } catch (const FitError& e) {
      fit_out << "n" << pulse_counts[k] << "_fit_error: " << e.what() << "\n";
    }
  }
  if (n_axis.size() >= 4) {
    const auto scaling = fit_power_law(n_axis, t2_axis);
    fit_out << "scaling_exponent: " << scaling.exponent << "\n";
  }
  outputs.push_back(fit_path);
  return 0;
}

int run_qscan(const World& world, const RunArgs& args, const std::string& hash,
              std::vector<std::string>& outputs) {
  ExperimentResult res;
  res.experiment = "hh_scan";
  res.config_hash = hash;
  res.seed = args.seed;
  res.axis_names = {"omega_GHz"};
  res.axis_grids = {{}};
  const int n_scan = 31;
  RabiQOptions opt;
  opt.seed = args.seed;
  opt.channel = world.hh_channel;
  opt.include_bath = world.bath_enabled;
  opt.include_flips = world.flips_enabled;
  opt.shots = args.shots > 0 ? std::max(args.shots, 1000) : 2000;
  res.shots = opt.shots;
  for (int i = 0; i < n_scan; ++i) {
    const double omega = 0.020 + (0.050 - 0.020) * double(i) / double(n_scan - 1);
    res.axis_grids[0].push_back(omega);
    const double q =
        rabi_q_factor_with_bath(omega, world.bath, world.spin, world.species, opt);
    res.mean.push_back(q);
    res.stderr_of_mean.push_back(0.0);
    res.mean_readout_z.push_back(0.0);
  }
  const std::string csv_path = (fs::path(args.out_dir) / "hh_scan.csv").string();
  write_result_csv(res, csv_path);
  outputs.push_back(csv_path);
  std::ofstream fit_out((fs::path(args.out_dir) / "hh_scan.fit.txt").string(),
                        std::ios::binary);
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < res.mean.size(); ++i)
    if (res.mean[i] < res.mean[argmin]) argmin = i;
  fit_out << "experiment: hh_scan\n";
  fit_out << "q_min: " << res.mean[argmin] << "\n";
  fit_out << "q_min_omega_MHz: " << res.axis_grids[0][argmin] * 1e3 << "\n";
  for (const auto& sp : world.species)
    fit_out << "larmor_" << sp.name
            << "_MHz: " << sp.larmor_ghz(world.spin.b_field_tesla) * 1e3 << "\n";
  outputs.push_back((fs::path(args.out_dir) / "hh_scan.fit.txt").string());
  return 0;
}

int run_init_transient(const World& world, const RunArgs& args, const std::string& hash,
                       std::vector<std::string>& outputs) {
  auto res = simulate_initialization(world.readout, world.spin, 1.0, 30.0);
  const std::string csv_path = (fs::path(args.out_dir) / "init_fidelity.csv").string();
  std::ofstream csv(csv_path, std::ios::binary);
  csv << "# " << version_string() << "\n# experiment: init_fidelity\n";
  csv << "# seed: " << args.seed << "\n# config: " << hash << "\n";
  csv << "# columns: t_ns,counts\n";
  for (std::size_t i = 0; i < res.time_ns.size(); ++i)
    csv << res.time_ns[i] << "," << res.counts[i] << "\n";
  outputs.push_back(csv_path);
  std::ofstream fit_out((fs::path(args.out_dir) / "init_fidelity.fit.txt").string(),
                        std::ios::binary);
  fit_out << "experiment: init_fidelity\n";
  fit_out << "i_peak: " << res.i_peak << "\n";
  fit_out << "i_ss: " << res.i_ss << "\n";
  fit_out << "fidelity: " << res.fidelity << "\n";
  fit_out << "pump_time_constant_ns: " << res.pump_time_constant_ns << "\n";
  outputs.push_back((fs::path(args.out_dir) / "init_fidelity.fit.txt").string());
  return 0;
}

int cmd_run(const RunArgs& args) {
  World world;
  std::string hash;
  ConfigTree tree;
  try {
    tree = args.config_path.empty() ? parse_config_text(default_config_text())
                                    : parse_config_file(args.config_path);
    for (const auto& o : args.overrides) apply_override(tree, o);
    world = world_from_config(tree);
    world.validate();
    hash = config_hash(tree);
  } catch (const std::exception& e) {
    fail(2, e.what());
  }
  if (args.threads > 0) set_default_thread_count(args.threads);

  std::error_code ec;
  fs::create_directories(args.out_dir, ec);

  std::vector<std::string> outputs;
  int worst = 0;
  try {
    std::vector<std::string> names;
    if (!args.sequence_path.empty()) {
      const auto seq = parse_sequence(read_file(args.sequence_path));
      PulseSequence named = seq;
      named.name = fs::path(args.sequence_path).stem().string();
      worst = run_single(named.name, world, named, args, hash, outputs);
      names.push_back(named.name);
    } else if (args.experiment == "figure-suite") {
      for (const auto& b : builtin_experiments_table()) names.push_back(b.name);
    } else {
      names.push_back(args.experiment);
    }
    if (args.sequence_path.empty()) {
      for (const auto& name : names) {
        int rc = 0;
        switch (builtin_kind(name)) {
          case BuiltinKind::Sequence:
            rc = run_single(name, world, build_experiment(name, world), args, hash,
                            outputs);
            break;
          case BuiltinKind::CoherenceCurve:
            rc = run_coherence_curve(name, world, args, hash, outputs);
            break;
          case BuiltinKind::QFactorScan:
            rc = run_qscan(world, args, hash, outputs);
            break;
          case BuiltinKind::InitTransient:
            rc = run_init_transient(world, args, hash, outputs);
            break;
        }
        if (name == "cooling_ramsey") {
          // protocol trajectory table: per-cycle ensemble mean and spread
          const auto traj = run_cooling(world.protocol, world.bath, 1000, args.seed);
          const std::string path =
              (fs::path(args.out_dir) / "cooling_trajectory.csv").string();
          std::ofstream f(path, std::ios::binary);
          f << "# " << version_string() << "\n# experiment: cooling_trajectory\n";
          f << "# seed: " << args.seed << "\n# config: " << hash << "\n";
          f << "# columns: cycle,mean_MHz,sigma_MHz\n";
          for (std::size_t c = 0; c < traj.sigma_ghz.size(); ++c)
            f << c << "," << traj.mean_ghz[c] * 1e3 << "," << traj.sigma_ghz[c] * 1e3
              << "\n";
          outputs.push_back(path);
        }
        worst = std::max(worst, rc);
      }
    }
  } catch (const ParseError& e) {
    fail(3, e.what());
  } catch (const FitError& e) {
    fail(4, e.what());
  } catch (const std::exception& e) {
    fail(3, e.what());
  }

  const std::string manifest_path = (fs::path(args.out_dir) / "manifest").string();
  write_manifest(manifest_path,
                 args.sequence_path.empty() ? args.experiment : args.sequence_path,
                 args.seed, hash, outputs);
  if (worst != 0) fail(worst, "fit stage failed, data files were written");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum-dot hole spin simulator"};
  app.require_subcommand(1);

  RunArgs args;
  auto* run = app.add_subcommand("run", "run an experiment and write result tables");
  run->add_option("--config", args.config_path, "config file (built-in defaults if omitted)");
  run->add_option("--experiment", args.experiment, "builtin experiment name or figure-suite");
  run->add_option("--sequence", args.sequence_path, "pulse sequence file (.seq)");
  run->add_option("--seed", args.seed, "RNG seed (required, no wall-clock default)")
      ->required();
  run->add_option("--shots", args.shots, "shots per sweep point");
  run->add_option("--threads", args.threads, "worker thread cap");
  run->add_option("--out", args.out_dir, "output directory");
  run->add_option("--set", args.overrides, "override config values, path=value");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check config invariants, report only");
  validate->add_option("--config", validate_path, "config file");

  auto* list = app.add_subcommand("list-experiments", "list builtin experiments");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& b : builtin_experiments_table())
      std::cout << b.name << "\t" << b.summary << "\n";
    return 0;
  }
  if (validate->parsed()) {
    try {
      const auto tree = validate_path.empty()
                            ? parse_config_text(default_config_text())
                            : parse_config_file(validate_path);
      const auto violations = validate_config(tree);
      int hard = 0;
      for (const auto& v : violations) {
        std::cout << (v.warning ? "warning" : "violation") << " " << v.path << ": "
                  << v.message << "\n";
        if (!v.warning) ++hard;
      }
      std::cout << "violations: " << hard << "\n";
      return 0;
    } catch (const std::exception& e) {
      fail(2, e.what());
    }
  }
  if (run->parsed()) {
    if (args.experiment.empty() && args.sequence_path.empty())
      fail(2, "run needs --experiment or --sequence");
    if (!args.experiment.empty() && args.experiment != "figure-suite" &&
        !is_builtin_experiment(args.experiment))
      fail(2, "unknown experiment '" + args.experiment + "'");
    return cmd_run(args);
  }
  return 0;
}
