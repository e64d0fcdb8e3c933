#include "qdspin/cavity.hpp"

#include <cmath>

#include "qdspin/units.hpp"

namespace qdspin {

void CavityParams::validate() const {
  if (!(finesse > 0.0)) throw CavityError("cavity.finesse must be positive");
  if (!(linewidth_ghz > 0.0)) throw CavityError("cavity.linewidth must be positive");
  if (mode_splitting_ghz < 0.0)
    throw CavityError("cavity.mode_splitting must be non-negative");
  if (has_mirrors()) {
    const double prod = mirror_r1 * mirror_r2;
    if (prod < 0.0 || prod >= 1.0)
      throw CavityError("cavity.mirrors: need 0 <= r1*r2 < 1");
    const double f_mirrors = finesse_from_mirrors(mirror_r1, mirror_r2);
    if (std::fabs(f_mirrors - finesse) > 1e-3 * finesse)
      throw CavityError("cavity.mirrors inconsistent with cavity.finesse (>0.1%)");
  }
}

double finesse_from_mirrors(double r1, double r2) {
  const double prod = r1 * r2;
  if (prod < 0.0 || prod >= 1.0)
    throw CavityError("finesse_from_mirrors: need 0 <= r1*r2 < 1");
  return pi / (1.0 - prod);
}

double mirrors_from_finesse(double finesse, double r2) {
  if (!(finesse > 0.0) || r2 <= 0.0)
    throw CavityError("mirrors_from_finesse: finesse and r2 must be positive");
  const double prod = 1.0 - pi / finesse;
  if (prod < 0.0)
    throw CavityError("mirrors_from_finesse: finesse below pi has no mirror solution");
  return prod / r2;
}

namespace {

double lorentzian_enhancement(double detuning_ghz, const CavityParams& cavity) {
  const double x_res = 8.0 * cavity.finesse / pi;
  const double hw = 0.5 * cavity.linewidth_ghz;  // kappa / 4pi
  return x_res * hw * hw / (hw * hw + detuning_ghz * detuning_ghz);
}

}  // namespace

double intensity_enhancement(double detuning_ghz, const CavityParams& cavity) {
  if (std::fabs(detuning_ghz) > 0.5 * cavity.free_spectral_range_ghz())
    throw CavityError(
        "intensity_enhancement: detuning beyond FSR/2 is outside the "
        "single-resonance model");
  return lorentzian_enhancement(detuning_ghz, cavity);
}

double enhancement_crossover_ghz(const CavityParams& cavity) {
  return cavity.linewidth_ghz * std::sqrt(2.0 * cavity.finesse / pi);
}

double JonesVector::ellipticity() const {
  const double ah = std::abs(h), av = std::abs(v);
  if (ah + av == 0.0) return 0.0;
  return std::fabs(ah - av) / (ah + av);
}

JonesVector polarization_compensation(double detuning_ghz, const CavityParams& cavity) {
  // H mode at -splitting/2 from the midpoint, V at +splitting/2. A laser
  // red-detuned by `detuning` sits below both modes. Only the ratio of the
  // two Lorentzians enters, which stays meaningful at asymptotically large
  // detuning, so no FSR range check here.
  const double half = 0.5 * cavity.mode_splitting_ghz;
  const double enh_h = lorentzian_enhancement(detuning_ghz - half, cavity);
  const double enh_v = lorentzian_enhancement(detuning_ghz + half, cavity);
  // The QD field is (h*sqrt(enh_h), v*sqrt(enh_v)); circular there means
  // equal magnitudes with a 90 degree phase.
  const double ah = 1.0 / std::sqrt(enh_h);
  const double av = 1.0 / std::sqrt(enh_v);
  const double norm = std::sqrt(ah * ah + av * av);
  return JonesVector{std::complex<double>(ah / norm, 0.0),
                     std::complex<double>(0.0, av / norm)};
}

}  // namespace qdspin
