// Result tables and run manifests.
//
// CSV layout: `#`-prefixed metadata lines (tool version, experiment, seed,
// config hash, shots, one `# axis:` line per sweep axis), a `# columns:`
// line, then one row per sweep point in row-major order over the declared
// axes: axis values first, then mean and standard error.
#pragma once

#include <string>

#include "qdspin/engine.hpp"

namespace qdspin {

std::string result_to_csv(const ExperimentResult& result);
void write_result_csv(const ExperimentResult& result, const std::string& path);

// Parses the format written above (metadata included); used to feed fit
// tools and to check that sweep metadata survives a round trip.
ExperimentResult read_result_csv(const std::string& path);

void write_manifest(const std::string& path, const std::string& experiment,
                    uint64_t seed, const std::string& config_hash,
                    const std::vector<std::string>& outputs);

std::string version_string();

}  // namespace qdspin
