#pragma once

#include <string>
#include <vector>

#include "metatele/psf.hpp"

namespace metatele {

// Contrast level used when quoting a single design cutoff frequency.
inline constexpr double kDesignMtfThreshold = 0.1;

struct MtfCurve {
  std::vector<double> frequency;  // cycles per meter, ascending
  std::vector<double> mtf;        // normalized to 1 at DC

  // Highest frequency before the curve first drops below `threshold`
  // (linear interpolation between bins). 0 if below at once.
  double cutoff(double threshold) const;
  // Frequency at which the curve crosses 0.5 (MTF50).
  double mtf50() const { return cutoff(0.5); }
  void save_csv(const std::string& path) const;
};

// Radially averaged modulation transfer function of a PSF: the normalized
// magnitude of the Fourier transform of the intensity pattern.
MtfCurve mtf(const PsfSample& sample);

// Same, for a raw intensity image with a physical pixel pitch.
MtfCurve mtf_of_image(const std::vector<double>& img, int n, double pitch);

}  // namespace metatele
