#pragma once

#include <string>
#include <vector>

#include "metatele/mtf.hpp"
#include "metatele/system_geometry.hpp"

namespace metatele {

struct DesignConstraints {
  double strehl_floor = 0.13;       // C
  double cutoff_floor = 250e3;      // f_N, cycles per meter
  double angle_max_deg = 3.0;       // theta_max
  double track_budget = 13.2 * mm;  // s_M
  double lambda0 = 532 * nm;

  void validate() const;
};

struct DesignOptions {
  int max_iterations_per_stage = 400;
  int penalty_stages = 3;          // annealed exterior quadratic penalty
  double penalty_start = 100.0;
  double penalty_growth = 10.0;
  int angle_grid = 7;              // constraint angles over [0, theta_max]
  int verify_n = 512;              // wave verification PSF grid
  int workers = 1;
};

struct AngleMargin {
  double angle_deg = 0.0;
  double strehl = 0.0;
  double margin = 0.0;  // strehl - C
};

struct DesignReport {
  int iterations = 0;
  bool feasible = false;
  double initial_ratio = 0.0;
  double final_ratio = 0.0;
  std::vector<double> ratio_trace;      // best ratio per accepted iterate
  std::vector<AngleMargin> strehl_margins;  // wave-verified
  double cutoff = 0.0;                  // wave-verified, cycles per meter
  double cutoff_margin = 0.0;           // cutoff - f_N
  double track = 0.0;
  double track_margin = 0.0;            // s_M - (m+s)
  std::string notes;

  void save_json(const std::string& path) const;
};

struct DesignResult {
  SystemGeometry geometry;
  DesignReport report;
};

// Minimizes the telephoto ratio TTL/EFL over the eyepiece polynomial
// coefficients and both separations, subject to the Strehl floor and MTF
// cutoff floor on the angle grid and the track budget. Derivative-free
// simplex descent with an annealed exterior quadratic penalty; fast
// fit-residual/geometric metrics drive the inner loop and the returned
// report is always wave-verified from scratch.
DesignResult optimize_design(const SystemGeometry& init,
                             const DesignConstraints& constraints,
                             const DesignOptions& opts = {});

// Wave-verified constraint evaluation of a geometry (used for the report
// and for re-checking optimizer outputs independently).
DesignReport verify_design(const SystemGeometry& geom,
                           const DesignConstraints& constraints,
                           const DesignOptions& opts = {});

}  // namespace metatele
