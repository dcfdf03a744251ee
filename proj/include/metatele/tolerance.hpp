#pragma once

#include <string>
#include <vector>

#include "metatele/psf.hpp"

namespace metatele {

enum class PerturbElement { kObjective, kEyepiece, kSensor };
enum class PerturbDof { kLateralX, kLateralY, kLongitudinalZ, kTiltX, kTiltY };

struct PerturbationSpec {
  PerturbElement element = PerturbElement::kEyepiece;
  PerturbDof dof = PerturbDof::kLateralX;
  double magnitude_max = 0.0;  // m for translations, rad for tilts
  int sample_count = 5;

  void validate() const;
};

struct ToleranceCurve {
  std::vector<double> magnitude;    // m or rad
  std::vector<double> mean_strehl;  // over the field grid

  void save_csv(const std::string& path) const;
};

struct ToleranceOptions {
  int n = 512;
  double field_max_deg = 3.0;  // grid spans [-field_max, +field_max]
  int field_points = 7;
};

// Mean Strehl over a fixed symmetric field-angle grid at each perturbation
// magnitude from 0 to magnitude_max inclusive. Deterministic for a fixed
// grid. Lateral decenter shifts the eyepiece phase/mask origin;
// longitudinal shifts move the separations; tilts add a first-order linear
// phase and evaluate the profile at projected coordinates.
ToleranceCurve tolerance_sweep(const SystemGeometry& geom,
                               const PerturbationSpec& spec,
                               const ToleranceOptions& opts = {},
                               int workers = 1);

// Mean Strehl of an unperturbed or perturbed configuration over the grid.
// object_distance <= 0 selects the geometry's own focal plane; tolerance
// sweeps pass the nominal plane so longitudinal shifts actually defocus.
double mean_strehl_over_field(const SystemGeometry& geom,
                              const EyepiecePerturbation& pert,
                              const ToleranceOptions& opts = {},
                              int workers = 1, double object_distance = 0.0);

}  // namespace metatele
