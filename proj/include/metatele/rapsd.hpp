#pragma once

#include <string>
#include <vector>

#include "metatele/common.hpp"

namespace metatele {

struct RapsdCurve {
  std::vector<double> freq_cycles_per_px;
  std::vector<double> freq_cycles_per_m;  // via the pixel pitch
  std::vector<double> mean_power;         // per-annulus average of |F|^2
  std::vector<int> bin_count;

  // Sum over annuli of mean_power * count: equals the total spectral power.
  double total_power() const;
  void save_csv(const std::string& path) const;
};

// Radially averaged power spectral density: the 2-D power spectrum binned
// into integer-radius annuli about DC, each bin averaged.
RapsdCurve rapsd(const std::vector<double>& image, int width, int height,
                 double pixel_pitch);

}  // namespace metatele
