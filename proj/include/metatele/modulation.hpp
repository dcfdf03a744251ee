#pragma once

#include <vector>

#include "metatele/common.hpp"

namespace metatele {

// Complex transmission T * e^{j phi} sampled on a square grid of nanocell
// centers (grid pitch is the nanocell pitch). Cells outside the aperture
// carry zero. This is how an as-fabricated metasurface layout feeds the
// PSF synthesis in place of the analytic phase profile.
struct SampledModulation {
  int m = 0;             // grid size, m x m
  double pitch = 0.0;    // cell pitch, meters
  std::vector<complexd> cells;

  complexd at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * m + col];
  }

  // Area-averaged modulation over a square patch centered at (x, y) with
  // the given half-width. Used to resample nanocell grids onto coarser
  // pupil grids.
  complexd box_average(double x, double y, double half_width) const;
};

}  // namespace metatele
