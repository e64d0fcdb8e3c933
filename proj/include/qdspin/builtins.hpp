// Builders for the standard experiment set. Each sequence-type builtin
// returns a fully parameterized PulseSequence with defaults taken from the
// World; two entries (hh_scan, init_fidelity) run dedicated procedures
// instead of the sweep engine.
#pragma once

#include <string>
#include <vector>

#include "qdspin/engine.hpp"

namespace qdspin {

enum class BuiltinKind { Sequence, CoherenceCurve, QFactorScan, InitTransient };

struct BuiltinInfo {
  std::string name;
  BuiltinKind kind;
  std::string summary;
};

const std::vector<BuiltinInfo>& builtin_experiments_table();

bool is_builtin_experiment(const std::string& name);
BuiltinKind builtin_kind(const std::string& name);

// Throws PhysicsError on an unknown name or a non-sequence builtin.
PulseSequence build_experiment(const std::string& name, const World& world);

// CPMG with an explicit pulse count (the `cpmg` table entry uses n = 4).
PulseSequence build_cpmg(const World& world, int n_pulses);

}  // namespace qdspin
