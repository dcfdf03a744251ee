#pragma once

#include <optional>
#include <vector>

#include "metatele/field_ops.hpp"
#include "metatele/modulation.hpp"
#include "metatele/system_geometry.hpp"

namespace metatele {

struct PsfSample {
  int n = 0;
  double pitch = 0.0;          // sensor-plane meters/sample
  double wavelength = 0.0;
  double distance = 0.0;       // object distance (in front)
  Vec2 field_point{};          // lateral source position x0
  std::vector<double> intensity;  // n x n, sums to power_fraction
  double strehl = 0.0;
  Vec2 centroid{};             // sensor coordinates
  double power_fraction = 0.0;

  double at(int row, int col) const {
    return intensity[static_cast<std::size_t>(row) * n + col];
  }
  double coord(int i) const { return (i - n / 2) * pitch; }
  double peak() const;
  // Square root of the second central moment (radial) about the centroid.
  double second_moment_radius() const;
};

enum class PsfPath {
  kPupilIntegral,  // single quadrature of the pupil integral (default)
  kFieldChain,     // end-to-end U0 -> U4 through the field operations
};

struct PsfOptions {
  int n = 1024;
  // Output pitch; 0 selects the geometry's sensor pixel pitch. The field
  // chain derives its own output pitch from the route and reports it.
  double pitch = 0.0;
  PsfPath path = PsfPath::kPupilIntegral;
  EyepiecePerturbation perturbation{};
  // When set, replaces the analytic eyepiece modulation (pupil path only).
  const SampledModulation* realized = nullptr;
  // Return the pattern about its own image point instead of translated to
  // -gamma * x0. The bulk translation is a pure pupil tilt with no shape
  // information, so recentering leaves Strehl/MTF untouched while keeping
  // wide-angle queries representable on sensor-pitch grids. The reported
  // centroid still refers to true sensor coordinates.
  bool recenter = false;
};

struct PsfQuery {
  double distance = 0.0;   // object distance in front; +inf = collimated
  double lambda = 532 * nm;
  Vec2 x0{};               // lateral source position
};

// Sensor-plane PSF of the two-element system for a point source at the
// given object distance, wavelength, and lateral position. The intensity
// grid lives in sensor coordinates; the pattern of an off-axis source is
// the axial pattern translated by -gamma * x0.
PsfSample psf(const SystemGeometry& geom, const PsfQuery& query,
              const PsfOptions& opts = {});

// Deterministic parallel batch: results are identical for any worker count.
std::vector<PsfSample> psf_batch(const SystemGeometry& geom,
                                 const std::vector<PsfQuery>& queries,
                                 const PsfOptions& opts = {}, int workers = 1);

}  // namespace metatele
