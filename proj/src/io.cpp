#include "qdspin/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qdspin {

std::string version_string() { return "qdspin 0.1.0"; }

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string result_to_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "# " << version_string() << "\n";
  out << "# experiment: " << r.experiment << "\n";
  out << "# seed: " << r.seed << "\n";
  out << "# config: " << r.config_hash << "\n";
  out << "# shots: " << r.shots << "\n";
  for (std::size_t a = 0; a < r.axis_names.size(); ++a) {
    out << "# axis: " << r.axis_names[a];
    for (double v : r.axis_grids[a]) out << " " << fmt(v);
    out << "\n";
  }
  out << "# columns: ";
  for (const auto& n : r.axis_names) out << n << ",";
  out << "mean,stderr\n";
  for (std::size_t p = 0; p < r.n_points(); ++p) {
    for (std::size_t a = 0; a < r.axis_names.size(); ++a)
      out << fmt(r.axis_at(a, p)) << ",";
    out << fmt(r.mean[p]) << "," << fmt(r.stderr_of_mean[p]) << "\n";
  }
  return out.str();
}

void write_result_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << result_to_csv(result);
}

ExperimentResult read_result_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  ExperimentResult r;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream is(line.substr(1));
      std::string tag;
      is >> tag;
      if (tag == "experiment:") {
        is >> r.experiment;
      } else if (tag == "seed:") {
        is >> r.seed;
      } else if (tag == "config:") {
        is >> r.config_hash;
      } else if (tag == "shots:") {
        is >> r.shots;
      } else if (tag == "axis:") {
        std::string name;
        is >> name;
        r.axis_names.push_back(name);
        std::vector<double> grid;
        double v;
        while (is >> v) grid.push_back(v);
        r.axis_grids.push_back(std::move(grid));
      }
      continue;
    }
    std::istringstream is(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(is, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() < 2) continue;
    r.mean.push_back(row[row.size() - 2]);
    r.stderr_of_mean.push_back(row[row.size() - 1]);
  }
  r.mean_readout_z.assign(r.mean.size(), 0.0);
  return r;
}

void write_manifest(const std::string& path, const std::string& experiment,
                    uint64_t seed, const std::string& config_hash,
                    const std::vector<std::string>& outputs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "generator: " << version_string() << "\n";
  f << "experiment: " << experiment << "\n";
  f << "seed: " << seed << "\n";
  f << "config: " << config_hash << "\n";
  for (const auto& o : outputs) f << "output: " << o << "\n";
}

}  // namespace qdspin
