#pragma once

#include "metatele/complex_field.hpp"
#include "metatele/phase_profile.hpp"

namespace metatele {

struct GridSpec {
  int n = 1024;
  double pitch = 2 * um;
};

// Wavefront of a point source at lateral position x0 and axial depth z0,
// sampled on the given grid: U0(x) = exp(j k/(2 z0) ||x0 - x||^2), unit
// total power. Positive z0 produces a wave diverging from a point in front
// of the plane; negative z0 the converging conjugate. z0 = +inf (or the
// collimated flag) yields a plane wave.
// Throws DomainError for z0 == 0 and SamplingError when the local fringe
// frequency at the grid edge exceeds Nyquist.
ComplexField point_source_field(Vec2 x0, double z0, double wavelength,
                                const GridSpec& grid,
                                bool collimated = false);

// Ideal thin lens: multiplies by exp(-j k/(2 f) ||x||^2), the second-order
// form of the spherical-lens modulation with f = R/(n-1).
// f = +inf returns the field unchanged.
ComplexField apply_thin_lens(const ComplexField& field, double focal);

// Metasurface modulation: multiplies by P(x) * exp(j phi(x; lambda0)).
// The exponent uses the design wavelength k0 regardless of the field's
// wavelength (dispersionless-modulation assumption), with an optional
// lateral shift of the phase/mask origin (decenter) and tilt.
struct EyepiecePerturbation {
  Vec2 decenter{};       // shift of phase + mask origin
  double tilt_x = 0.0;   // rad, about the y axis
  double tilt_y = 0.0;   // rad, about the x axis
};

ComplexField apply_phase_profile(const ComplexField& field,
                                 const PhaseProfile& profile,
                                 const ApertureMask& mask,
                                 const EyepiecePerturbation& pert = {});

}  // namespace metatele
