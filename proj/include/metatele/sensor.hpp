#pragma once

#include <string>
#include <vector>

#include "metatele/spectra.hpp"

namespace metatele {

// Photosensor and capture-chain description for the two-shot measurement
// model. The structure shot looks through a narrow bandpass at the design
// wavelength; the color shot uses the full RGB responses.
struct SensorModel {
  double pixel_pitch = 2.0 * um;
  int width = 512;
  int height = 512;
  double quantum_efficiency = 0.6;   // e- per photon
  double gain = 1.0;                 // DN per e-
  double read_noise = 2.0;           // e- RMS
  double exposure_structure = 1.0;   // s
  double exposure_color = 0.1;       // s
  double band_center = 532 * nm;
  double band_fwhm = 10 * nm;
  // Photons per (radiance unit * second * meter of bandwidth) reaching a
  // pixel; sets absolute signal levels, which are configuration rather
  // than physics.
  double radiance_scale = 2.0e13;
  RgbSpectra response = RgbSpectra::default_sensor();

  void validate() const;
};

// Planar scene: a linear-RGB texture displayed front-parallel at a given
// depth, with an RGB -> spectrum upsampling basis.
struct SceneSpec {
  std::vector<double> texture;  // H x W x 3, linear radiance, >= 0
  int width = 0;
  int height = 0;
  double depth = 673 * mm;
  double display_width = 7.6 * mm;  // physical extent of the texture
  RgbSpectra basis = RgbSpectra::default_display();

  void validate() const;
  static SceneSpec from_png(const std::string& path, double depth,
                            double display_width);
  // Spectral radiance of a texel at wavelength lambda.
  double radiance(int row, int col, double lambda) const;
};

struct Image {
  std::vector<double> data;  // H x W x C
  int width = 0;
  int height = 0;
  int channels = 1;

  double& at(int row, int col, int ch = 0) {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  double at(int row, int col, int ch = 0) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
};

struct MeasurementPair {
  Image structure;   // H x W, linear DN
  Image color_cue;   // H x W x 3, linear DN
  std::uint64_t seed = 0;
  std::uint64_t geometry_hash = 0;
  double exposure_structure = 0.0;
  double exposure_color = 0.0;
};

}  // namespace metatele
