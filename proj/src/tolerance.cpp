#include "metatele/tolerance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "metatele/parallel.hpp"

namespace metatele {

void PerturbationSpec::validate() const {
  const bool tilt = dof == PerturbDof::kTiltX || dof == PerturbDof::kTiltY;
  if (magnitude_max < 0) throw DomainError("PerturbationSpec: negative range");
  if (tilt && magnitude_max > deg2rad(1.0) + 1e-12) {
    std::ostringstream os;
    os << "PerturbationSpec: tilt " << rad2deg(magnitude_max)
       << " deg outside the small-perturbation validity range (<= 1 deg)";
    throw DomainError(os.str());
  }
  if (!tilt && dof != PerturbDof::kLongitudinalZ &&
      magnitude_max > 0.1 * mm + 1e-12) {
    std::ostringstream os;
    os << "PerturbationSpec: lateral decenter " << magnitude_max / mm
       << " mm outside the small-perturbation validity range (<= 0.1 mm)";
    throw DomainError(os.str());
  }
  if (sample_count < 2)
    throw DomainError("PerturbationSpec: need at least 2 samples");
}

double mean_strehl_over_field(const SystemGeometry& geom,
                              const EyepiecePerturbation& pert,
                              const ToleranceOptions& opts, int workers,
                              double object_distance) {
  const double w =
      object_distance > 0 ? object_distance : focal_plane(geom, geom.lambda0);
  if (!(w > 0) || !std::isfinite(w))
    throw DomainError("mean_strehl_over_field: no positive focal plane");
  std::vector<PsfQuery> queries;
  for (int i = 0; i < opts.field_points; ++i) {
    const double theta =
        deg2rad(-opts.field_max_deg +
                2.0 * opts.field_max_deg * i / (opts.field_points - 1));
    queries.push_back({w, geom.lambda0, {w * std::tan(theta), 0.0}});
  }
  PsfOptions popts;
  popts.n = opts.n;
  popts.perturbation = pert;
  popts.recenter = true;
  const auto samples = psf_batch(geom, queries, popts, workers);
  double acc = 0.0;
  for (const auto& s : samples) acc += s.strehl;
  return acc / samples.size();
}

ToleranceCurve tolerance_sweep(const SystemGeometry& geom,
                               const PerturbationSpec& spec,
                               const ToleranceOptions& opts, int workers) {
  geom.validate();
  spec.validate();
  const double nominal_plane = focal_plane(geom, geom.lambda0);
  ToleranceCurve curve;
  for (int i = 0; i < spec.sample_count; ++i) {
    const double mag = spec.magnitude_max * i / (spec.sample_count - 1);
    SystemGeometry g = geom;
    EyepiecePerturbation pert;
    switch (spec.dof) {
      case PerturbDof::kLateralX:
      case PerturbDof::kLateralY: {
        // Objective decenter is equivalent to an opposite eyepiece+sensor
        // decenter in this two-element model; the sensor case shifts only
        // the recorded pattern and leaves Strehl unchanged.
        double dx = spec.dof == PerturbDof::kLateralX ? mag : 0.0;
        double dy = spec.dof == PerturbDof::kLateralY ? mag : 0.0;
        if (spec.element == PerturbElement::kObjective) {
          dx = -dx;
          dy = -dy;
        }
        if (spec.element != PerturbElement::kSensor)
          pert.decenter = {dx, dy};
        break;
      }
      case PerturbDof::kLongitudinalZ:
        if (spec.element == PerturbElement::kObjective) {
          g.m_sep += mag;
        } else if (spec.element == PerturbElement::kEyepiece) {
          g.m_sep += mag;
          g.s_sep -= mag;
        } else {
          g.s_sep += mag;
        }
        break;
      case PerturbDof::kTiltX:
        pert.tilt_x = mag;
        break;
      case PerturbDof::kTiltY:
        pert.tilt_y = mag;
        break;
    }
    curve.magnitude.push_back(mag);
    curve.mean_strehl.push_back(
        mean_strehl_over_field(g, pert, opts, workers, nominal_plane));
  }
  return curve;
}

void ToleranceCurve::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("ToleranceCurve: cannot write " + path);
  out << "magnitude,mean_strehl\n";
  out.precision(10);
  for (std::size_t i = 0; i < magnitude.size(); ++i)
    out << magnitude[i] << "," << mean_strehl[i] << "\n";
}

}  // namespace metatele
