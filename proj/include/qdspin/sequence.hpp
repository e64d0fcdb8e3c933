// Pulse sequences: element list, sweep declarations, and the line-oriented
// text format.
//
//   # comment
//   init 30ns
//   raman omega=95MHz delta=0MHz phase=0 t=5.26ns
//   raman power=1mW detuning=320GHz delta=0 phase=pi/2 t=2.6ns
//   wait 100ns
//   hhdrive omega=26MHz t=60ns
//   cool
//   readout 90ns
//   barrier
//   sweep wait.t from 0ns to 200ns steps 101
//   sweep raman[1].phase from 0 to 2pi steps 64
//   interleave phase 0 pi
//   shots 5000
//
// `kind.param` binds a sweep to every element of that kind; `kind[i].param`
// to the i-th such element (0-based). Raman phases are qubit-frame; the
// microwave phase applied at the modulator is half of them.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdspin/units.hpp"

namespace qdspin {

struct ParseError : std::runtime_error {
  ParseError(int line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
  int line;
};

enum class ElementKind { Init, Raman, Wait, Readout, HHDrive, Cool, Barrier };

const char* element_kind_name(ElementKind kind);

struct PulseElement {
  ElementKind kind = ElementKind::Barrier;
  double duration_ns = 0.0;
  double omega_ghz = -1.0;    // spin Rabi (Raman) or drive Rabi (HHDrive); <0 = derive
  double power_mw = -1.0;     // optional power route for Raman; <0 = unused
  double detuning_ghz = 0.0;  // optical detuning for the power route
  double delta_ghz = 0.0;     // two-photon detuning
  double phase_rad = 0.0;     // qubit-frame phase in [0, 2pi)
};

struct SweepBinding {
  std::size_t element_index;
  std::string param;  // "t", "omega", "power", "delta", "phase", "detuning"
  double scale = 1.0;
  double offset = 0.0;  // applied value = scale * axis_value + offset
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;
  std::vector<SweepBinding> bindings;
};

struct PulseSequence {
  std::string name = "sequence";
  std::vector<PulseElement> elements;
  std::vector<SweepAxis> sweeps;
  bool interleave = false;
  std::vector<double> interleave_phases;  // added to the last Raman pulse
  int shots = 0;  // 0 = use the run default

  std::size_t n_points() const {
    std::size_t n = 1;
    for (const auto& s : sweeps) n *= s.values.size();
    return n;
  }
  // Elements with sweep values applied for a flattened row-major index.
  std::vector<PulseElement> materialize(std::size_t point_index) const;
  // Axis values for a flattened index, row-major over declared sweeps.
  std::vector<double> axis_values_at(std::size_t point_index) const;

  // Structural invariants: a readout present, exactly one Init and it
  // precedes the first Raman, bindings reference existing elements.
  void validate() const;
};

PulseSequence parse_sequence(const std::string& text);

}  // namespace qdspin
