#pragma once

#include <string>
#include <vector>

#include "metatele/common.hpp"

namespace metatele {

// Tabulated spectral curve with linear interpolation, zero outside the
// tabulated range.
struct SpectralCurve {
  std::vector<double> wavelength;  // m, ascending
  std::vector<double> value;

  double at(double lambda) const;
  static SpectralCurve load_csv(const std::string& path);
  void save_csv(const std::string& path) const;
  static SpectralCurve gaussian(double center, double fwhm, double peak = 1.0,
                                double lo = 380 * nm, double hi = 700 * nm,
                                int samples = 161);
};

// Generic CMOS-like RGB responses and smooth display primaries, shipped as
// data files; these builders regenerate the same synthetic curves.
struct RgbSpectra {
  SpectralCurve r, g, b;

  double channel(int c, double lambda) const {
    return c == 0 ? r.at(lambda) : (c == 1 ? g.at(lambda) : b.at(lambda));
  }
  static RgbSpectra default_sensor();
  static RgbSpectra default_display();
  static RgbSpectra load(const std::string& dir, const std::string& stem);
  void save(const std::string& dir, const std::string& stem) const;
};

struct QuadratureNode {
  double lambda = 0.0;
  double weight = 0.0;  // includes the d(lambda) measure
};

// Spectral quadrature for the full-visible color path: uniform nodes over
// [400, 700] nm.
std::vector<QuadratureNode> color_quadrature(int count = 31,
                                             double lo = 400 * nm,
                                             double hi = 700 * nm);

// Gaussian-weighted nodes across a narrow bandpass (center, FWHM).
std::vector<QuadratureNode> band_quadrature(double center, double fwhm,
                                            int count = 5);

}  // namespace metatele
