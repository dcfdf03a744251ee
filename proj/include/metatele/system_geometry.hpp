#pragma once

#include <cstdint>
#include <optional>

#include "metatele/complex_field.hpp"
#include "metatele/phase_profile.hpp"

namespace metatele {

// ---------------------------------------------------------------------------
// Object-side sign convention
//
// The paraxial closed forms below are written for a signed axial coordinate
// z0: a wavefront exp(+j k/(2 z0) ||x0 - x||^2) entering the objective. The
// public API of this module takes object DISTANCES (positive in front of the
// camera) and maps them through object_depth(), which negates them. This is
// the one reading of the input-wave convention under which the production
// geometry's focal plane z_f(lambda0) comes out positive and finite, the
// autofocus fixed point holds, and the whole toolkit (wave chain, closed
// forms, ray tracer) stays mutually consistent. Sensor coordinates are
// parity-flipped relative to the pupil axes, so a point at lateral x0 images
// to -gamma * x0 with gamma = -s * B2 (> 0 for the production system).
// The mapping lives here and only here; formulas are verbatim otherwise.
// ---------------------------------------------------------------------------
inline double object_depth(double distance_in_front) {
  return -distance_in_front;
}

struct LensModel {
  double n_index = 0.0;       // refraction index
  double surface_radius = 0;  // m; f1 = R / (n - 1)
};

struct SystemGeometry {
  double f1 = 7.5 * mm;                 // objective focal length
  double objective_aperture = 5 * mm;   // diameter
  PhaseProfile profile =
      PhaseProfile::quadratic(-2 * mm);  // eyepiece phase at lambda0
  ApertureMask eyepiece_mask{0.8 * mm};  // the aperture stop
  double m_sep = 5.6 * mm;               // objective -> eyepiece
  double s_sep = 7.6 * mm;               // eyepiece -> sensor
  double lambda0 = 532 * nm;
  double sensor_pitch = 2.0 * um;
  std::optional<LensModel> lens_model;

  void validate() const;
  double ttl() const { return m_sep + s_sep; }
  // Chromatic power term of the eyepiece: fitted quadratic focal length for
  // polynomial profiles, the profile's own f otherwise.
  double eyepiece_focal() const;
  std::uint64_t hash() const;
};

struct ParaxialCoefficients {
  double a2 = 0.0;  // 1/m
  double b2 = 0.0;  // 1/m
};

// Closed-form quadratic/linear coefficients of the field after the
// objective-to-eyepiece leg, evaluated verbatim in the signed coordinate:
//   A2 = 1/m - (1/m^2) / (1/m + 1/z0 - 1/f1)
//   B2 = 1/(z0 m) / (1/m + 1/z0 - 1/f1)
// z0_signed is the formula coordinate (use object_depth() for a real object
// in front). z0_signed = +/-inf is the collimated limit.
// Throws DegenerateConjugateError when the shared denominator vanishes.
ParaxialCoefficients paraxial_coefficients(const SystemGeometry& geom,
                                           double z0_signed);

// Residual defocus Delta(lambda) = 1/s + A2 - (k0/k(lambda)) / f2 for an
// object at `distance` in front of the camera (mapped internally).
double residual_defocus(const SystemGeometry& geom, double distance,
                        double lambda);

// In-focus object distance (positive in front) for wavelength lambda:
//   z_f = (1/(m^2 R) - 1/m + 1/f1)^{-1},  R = 1/s + 1/m - (k0/k)/f2,
// mapped to the public convention. +inf means focused at infinity.
// Throws AfocalError when R vanishes.
double focal_plane(const SystemGeometry& geom, double lambda);

struct SystemScales {
  double gamma = 0.0;            // transverse magnification, -s * B2
  double efl = 0.0;              // s f1 / (f1 - m)
  double telephoto_ratio = 0.0;  // TTL / EFL
};

// Magnification at the given object distance plus the system EFL and
// telephoto ratio. Throws AfocalError when f1 == m_sep.
SystemScales magnification_and_efl(const SystemGeometry& geom,
                                   double distance);

}  // namespace metatele
