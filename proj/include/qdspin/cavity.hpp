// One-sided Fabry-Perot intensity enhancement near a single resonance.
//
// The cavity is treated as a Lorentzian response: resonant intensity
// enhancement X = 8F/pi, rolling off as (kappa/4pi)^2 / ((kappa/4pi)^2 +
// detuning^2). Two orthogonal linear modes (H and V) share the same
// linewidth and finesse and are split by mode_splitting.
#pragma once

#include <complex>
#include <stdexcept>

namespace qdspin {

struct CavityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CavityParams {
  double finesse = 500.0;
  double linewidth_ghz = 25.0;       // kappa / 2pi
  double mode_splitting_ghz = 50.0;  // V mode sits above H by this much
  double mirror_r1 = 0.0;            // amplitude reflection, 0 = not specified
  double mirror_r2 = 0.0;
  double resonance_thz = 324.7;  // f0, bookkeeping only

  bool has_mirrors() const { return mirror_r1 > 0.0 || mirror_r2 > 0.0; }
  double free_spectral_range_ghz() const { return finesse * linewidth_ghz; }
  // Throws CavityError when invariants are violated (finesse vs mirrors
  // beyond 0.1%, r1*r2 outside [0,1), non-positive finesse).
  void validate() const;
};

// F = pi / (1 - r1 r2); throws on r1 r2 >= 1.
double finesse_from_mirrors(double r1, double r2);

// Inverse of the above with r2 fixed: returns r1 such that
// finesse_from_mirrors(r1, r2) == finesse.
double mirrors_from_finesse(double finesse, double r2 = 1.0);

// Intensity enhancement I_c/I_0 at a detuning from the (single) mode.
// Valid within one free spectral range of resonance; throws beyond FSR/2.
double intensity_enhancement(double detuning_ghz, const CavityParams& cavity);

// Detuning at which the enhancement crosses one: (kappa/2pi) sqrt(2F/pi).
double enhancement_crossover_ghz(const CavityParams& cavity);

// Jones vector (complex H and V amplitudes, |h|^2 + |v|^2 = 1).
struct JonesVector {
  std::complex<double> h;
  std::complex<double> v;
  double intensity() const { return std::norm(h) + std::norm(v); }
  // |(|h|-|v|)| / (|h|+|v|): zero for circular light.
  double ellipticity() const;
};

// Input polarization which, after each mode scales its amplitude by
// sqrt(enhancement at that mode's detuning), arrives circular at the QD.
// detuning_ghz is measured from the midpoint between the two modes.
JonesVector polarization_compensation(double detuning_ghz, const CavityParams& cavity);

}  // namespace qdspin
