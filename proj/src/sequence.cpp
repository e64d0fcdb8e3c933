#include "qdspin/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdspin {

const char* element_kind_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::Init: return "init";
    case ElementKind::Raman: return "raman";
    case ElementKind::Wait: return "wait";
    case ElementKind::Readout: return "readout";
    case ElementKind::HHDrive: return "hhdrive";
    case ElementKind::Cool: return "cool";
    case ElementKind::Barrier: return "barrier";
  }
  return "?";
}

namespace {

struct ParamInfo {
  Dimension dim;
  double PulseElement::* member;
};

const ParamInfo* param_info(const std::string& name) {
  static const std::pair<std::string, ParamInfo> table[] = {
      {"t", {Dimension::Time, &PulseElement::duration_ns}},
      {"omega", {Dimension::Frequency, &PulseElement::omega_ghz}},
      {"power", {Dimension::Power, &PulseElement::power_mw}},
      {"delta", {Dimension::Frequency, &PulseElement::delta_ghz}},
      {"detuning", {Dimension::Frequency, &PulseElement::detuning_ghz}},
      {"phase", {Dimension::Angle, &PulseElement::phase_rad}},
  };
  for (const auto& [k, v] : table)
    if (k == name) return &v;
  return nullptr;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

ElementKind kind_from_word(const std::string& w, int line_no) {
  if (w == "init") return ElementKind::Init;
  if (w == "raman") return ElementKind::Raman;
  if (w == "wait") return ElementKind::Wait;
  if (w == "readout") return ElementKind::Readout;
  if (w == "hhdrive") return ElementKind::HHDrive;
  if (w == "cool") return ElementKind::Cool;
  if (w == "barrier") return ElementKind::Barrier;
  throw ParseError(line_no, "unknown keyword '" + w + "'");
}

double parse_or_throw(const std::string& text, Dimension dim, int line_no,
                      const std::string& what) {
  auto v = parse_quantity(text, dim);
  if (!v) throw ParseError(line_no, "cannot parse " + what + " '" + text + "'");
  return *v;
}

}  // namespace

PulseSequence parse_sequence(const std::string& text) {
  PulseSequence seq;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& head = tok[0];

    if (head == "sweep") {
      // sweep <field> from <a> to <b> steps <n>
      if (tok.size() != 8 || tok[2] != "from" || tok[4] != "to" || tok[6] != "steps")
        throw ParseError(line_no, "expected: sweep <field> from <a> to <b> steps <n>");
      std::string field = tok[1];
      std::string kind_word = field, param_word;
      long index = -1;
      if (auto dot = field.find('.'); dot != std::string::npos) {
        kind_word = field.substr(0, dot);
        param_word = field.substr(dot + 1);
      } else {
        throw ParseError(line_no, "sweep field must look like kind.param");
      }
      if (auto br = kind_word.find('['); br != std::string::npos) {
        if (kind_word.back() != ']')
          throw ParseError(line_no, "malformed element index in '" + field + "'");
        index = std::strtol(kind_word.c_str() + br + 1, nullptr, 10);
        kind_word = kind_word.substr(0, br);
      }
      const ElementKind kind = kind_from_word(kind_word, line_no);
      const ParamInfo* info = param_info(param_word);
      if (!info) throw ParseError(line_no, "unknown sweep parameter '" + param_word + "'");

      SweepAxis axis;
      axis.name = kind_word + (index >= 0 ? std::to_string(index) : "") + "_" + param_word;
      const double a = parse_or_throw(tok[3], info->dim, line_no, "sweep start");
      const double b = parse_or_throw(tok[5], info->dim, line_no, "sweep end");
      const long n = std::strtol(tok[7].c_str(), nullptr, 10);
      if (n < 2) throw ParseError(line_no, "sweep needs at least 2 steps");
      axis.values.resize(n);
      for (long i = 0; i < n; ++i)
        axis.values[i] = a + (b - a) * double(i) / double(n - 1);

      long seen = 0;
      for (std::size_t e = 0; e < seq.elements.size(); ++e) {
        if (seq.elements[e].kind != kind) continue;
        if (index < 0 || seen == index)
          axis.bindings.push_back({e, param_word, 1.0, 0.0});
        ++seen;
      }
      if (axis.bindings.empty())
        throw ParseError(line_no, "sweep references no existing element '" + field + "'");
      seq.sweeps.push_back(std::move(axis));
      continue;
    }

    if (head == "interleave") {
      if (tok.size() < 3 || tok[1] != "phase")
        throw ParseError(line_no, "expected: interleave phase <p1> <p2> ...");
      seq.interleave = true;
      seq.interleave_phases.clear();
      for (std::size_t i = 2; i < tok.size(); ++i)
        seq.interleave_phases.push_back(
            parse_or_throw(tok[i], Dimension::Angle, line_no, "interleave phase"));
      continue;
    }

    if (head == "shots") {
      if (tok.size() != 2) throw ParseError(line_no, "expected: shots <n>");
      seq.shots = int(std::strtol(tok[1].c_str(), nullptr, 10));
      if (seq.shots < 1) throw ParseError(line_no, "shots must be >= 1");
      continue;
    }

    // element line
    PulseElement el;
    el.kind = kind_from_word(head, line_no);
    std::size_t arg_start = 1;
    // positional duration: "init 30ns", "wait 100ns", "readout 90ns"
    if (tok.size() > 1 && tok[1].find('=') == std::string::npos) {
      el.duration_ns =
          parse_or_throw(tok[1], Dimension::Time, line_no, "duration");
      arg_start = 2;
    }
    for (std::size_t i = arg_start; i < tok.size(); ++i) {
      auto eq = tok[i].find('=');
      if (eq == std::string::npos)
        throw ParseError(line_no, "expected key=value, got '" + tok[i] + "'");
      const std::string key = tok[i].substr(0, eq);
      const std::string val = tok[i].substr(eq + 1);
      const ParamInfo* info = param_info(key);
      if (!info) throw ParseError(line_no, "unknown parameter '" + key + "'");
      el.*(info->member) = parse_or_throw(val, info->dim, line_no, key);
    }
    if (el.duration_ns < 0.0) throw ParseError(line_no, "negative duration");
    if (el.kind == ElementKind::Raman) {
      el.phase_rad = std::fmod(el.phase_rad, two_pi);
      if (el.phase_rad < 0.0) el.phase_rad += two_pi;
    }
    seq.elements.push_back(el);
  }
  try {
    seq.validate();
  } catch (const std::runtime_error& e) {
    throw ParseError(line_no, e.what());
  }
  return seq;
}

void PulseSequence::validate() const {
  bool has_readout = false;
  for (const auto& el : elements)
    if (el.kind == ElementKind::Readout) has_readout = true;
  if (!has_readout) throw std::runtime_error("no readout element");

  long init_count = 0;
  bool raman_seen = false, init_before_raman = false;
  for (const auto& el : elements) {
    if (el.kind == ElementKind::Init) {
      ++init_count;
      if (!raman_seen) init_before_raman = true;
    }
    if (el.kind == ElementKind::Raman) raman_seen = true;
    if (el.duration_ns < 0.0) throw std::runtime_error("negative duration");
  }
  if (raman_seen && !init_before_raman)
    throw std::runtime_error("no init element before the first raman pulse");

  for (const auto& axis : sweeps) {
    if (axis.values.empty()) throw std::runtime_error("empty sweep axis");
    for (const auto& b : axis.bindings) {
      if (b.element_index >= elements.size())
        throw std::runtime_error("sweep binding references a missing element");
      if (!param_info(b.param))
        throw std::runtime_error("sweep binding references unknown field " + b.param);
    }
  }
}

std::vector<double> PulseSequence::axis_values_at(std::size_t point_index) const {
  std::vector<double> out(sweeps.size());
  std::size_t rem = point_index;
  for (std::size_t a = sweeps.size(); a-- > 0;) {
    const std::size_t n = sweeps[a].values.size();
    out[a] = sweeps[a].values[rem % n];
    rem /= n;
  }
  return out;
}

std::vector<PulseElement> PulseSequence::materialize(std::size_t point_index) const {
  std::vector<PulseElement> out = elements;
  const auto axis_vals = axis_values_at(point_index);
  for (std::size_t a = 0; a < sweeps.size(); ++a) {
    for (const auto& b : sweeps[a].bindings) {
      const double value = b.scale * axis_vals[a] + b.offset;
      PulseElement& el = out[b.element_index];
      el.*(param_info(b.param)->member) = value;
    }
  }
  return out;
}

}  // namespace qdspin
