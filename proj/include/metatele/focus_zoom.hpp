#pragma once

#include "metatele/system_geometry.hpp"

namespace metatele {

// Eyepiece-to-sensor separation focusing the system on an object at the
// given distance (design wavelength). Root of the residual defocus in s,
// found to |Delta| < 1e-9 per millimeter.
// Throws NoRootError (naming the scanned interval) when no separation
// focuses that distance.
double autofocus_solve(const SystemGeometry& geom, double distance);

struct ZoomSolution {
  double m_sep = 0.0;
  double s_sep = 0.0;
  SystemGeometry geometry;  // input geometry with the solved separations
};

// Separations realizing the target EFL while staying focused at the
// reference object distance. Valid targets span [20 mm, 50 mm].
ZoomSolution zoom_solve(const SystemGeometry& geom, double target_efl,
                        double reference_distance = 673 * mm);

struct HyperfocalResult {
  double f_number = 0.0;
  double airy_diameter = 0.0;      // m
  double circle_of_confusion = 0;  // m
  double hyperfocal = 0.0;         // m
  double near_limit = 0.0;         // m
  bool pixel_limited = false;
};

// Diffraction-aware hyperfocal distance: N = efl/epd, d_Airy = 2.44 lambda N,
// coc = max(d_Airy, pixel pitch), H = efl^2/(N coc), near limit H/2.
HyperfocalResult hyperfocal(double epd, double efl, double lambda,
                            double pixel_pitch);

}  // namespace metatele
