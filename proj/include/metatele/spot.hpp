#pragma once

#include <string>
#include <vector>

#include "metatele/system_geometry.hpp"

namespace metatele {

struct SpotDiagram {
  std::vector<Vec2> points;  // sensor-plane landing positions, meters
  Vec2 centroid{};
  double rms = 0.0;          // radial RMS about the centroid, meters

  void save_csv(const std::string& path) const;
};

// Geometric spot diagram at the given field angle. The source sits on the
// design-wavelength focal plane; rays fill the aperture stop uniformly
// (Vogel spiral), deflect by -x/f1 at the objective and by
// (lambda0/2pi) * grad(phi) at the eyepiece, and land after the sensor leg.
// Throws NoRootError if the geometry has no finite positive focal plane and
// Error("ray miss") if a ray leaves the eyepiece mask.
SpotDiagram spot_trace(const SystemGeometry& geom, double field_angle_deg,
                       int n_rays);

}  // namespace metatele
