// Monte-Carlo experiment runner: composes the cavity, spin, bath and
// sequence pieces into swept readout-signal tables.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdspin/cavity.hpp"
#include "qdspin/dynamics.hpp"
#include "qdspin/noise.hpp"
#include "qdspin/nuclear_bath.hpp"
#include "qdspin/sequence.hpp"

namespace qdspin {

// Everything the engine needs to evolve one shot.
struct World {
  CavityParams cavity;
  SpinSystem spin;
  RamanDrive raman;  // default drive for the power route and builders
  OverhauserState bath;
  std::vector<NuclearSpecies> species = default_species();
  HartmannHahnChannel hh_channel;
  CoolingProtocol protocol;
  NoiseSpectrum noise;
  ReadoutModel readout;

  // builder defaults
  double drive_delta_ghz = 0.0;
  double rabi_trace_ns = 300.0;

  // engine switches
  bool bath_enabled = true;
  bool flips_enabled = true;
  bool t1_enabled = true;
  bool hh_damping_enabled = true;
  // Integrate Raman pulses in the lab frame (full Raman beat). Meant for
  // single-pulse Rabi traces; later pulses are not frame-corrected.
  bool non_rwa = false;
  bool poisson_counts = false;
  double init_infidelity = 0.0;
  int default_shots = 1000;

  // Spin Rabi frequency for a Raman element, honoring an explicit omega or
  // falling back to the power/detuning route.
  double resolve_omega_ghz(const PulseElement& el) const;
  void validate() const;
};

World default_world();

struct ExperimentResult {
  std::string experiment;
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axis_grids;  // one grid per axis
  // flattened row-major over the axis grids
  std::vector<double> mean;
  std::vector<double> stderr_of_mean;
  // z at the recorded readout, averaged over shots and interleave phases;
  // diagnoses the net spin polarization the bath is exposed to
  std::vector<double> mean_readout_z;
  int shots = 0;
  uint64_t seed = 0;
  std::string config_hash;

  std::size_t n_points() const { return mean.size(); }
  // Axis value of axis `a` at flattened point `idx`.
  double axis_at(std::size_t a, std::size_t idx) const;
};

ExperimentResult run_experiment(const PulseSequence& seq, const World& world,
                                int shots, uint64_t seed);

}  // namespace qdspin
