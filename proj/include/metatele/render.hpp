#pragma once

#include "metatele/sensor.hpp"
#include "metatele/system_geometry.hpp"

namespace metatele {

enum class Channel { kStructure, kColor };

struct RenderOptions {
  bool no_noise = false;
  bool shift_variant = false;  // 3x3 PSF-grid interpolation stress mode
  int psf_n = 1024;            // PSF kernel grid
  int workers = 1;
  std::uint64_t image_index = 0;  // keys the per-pixel noise streams
  // Scene placement used when the dataset generator builds scenes itself.
  double scene_depth = 673 * mm;
  double scene_display_width = 7.6 * mm;
};

// Ideal sensor-plane image of the scene: the texture mapped through the
// magnification (a point at x lands at -gamma x) onto the sensor grid,
// before any blur or noise. This is the dataset ground truth.
Image ideal_image(const SceneSpec& scene, const SystemGeometry& geom,
                  const SensorModel& sensor);

// One measurement through the focused system: per-wavelength convolution of
// the magnified scene with the system PSF, spectral weighting, then
// Poisson shot noise, gain, and Gaussian read noise.
// Throws DomainError when the geometry is not focused at the scene depth.
Image render_measurement(const SceneSpec& scene, const SystemGeometry& geom,
                         const SensorModel& sensor, Channel channel,
                         std::uint64_t seed, const RenderOptions& opts = {});

// Structure image (bandpass, exposure_structure) plus color cue (full
// spectrum, exposure_color) through the same geometry.
MeasurementPair render_pair(const SceneSpec& scene, const SystemGeometry& geom,
                            const SensorModel& sensor, std::uint64_t seed,
                            const RenderOptions& opts = {});

struct DatasetResult {
  int rendered = 0;
  int skipped = 0;
  int reused = 0;
  std::string manifest_path;
};

// Renders `count` {structure, color cue, ground truth} triples from the
// images in scene_dir into out_dir with a manifest. Deterministic for a
// fixed (manifest, seed); unreadable inputs are recorded and skipped;
// existing outputs are reused.
DatasetResult generate_dataset(const std::string& scene_dir,
                               const SystemGeometry& geom,
                               const SensorModel& sensor, int count,
                               std::uint64_t seed, const std::string& out_dir,
                               const RenderOptions& opts = {});

// Exposed for the term-by-term oracle: sum_q weights[q] * (planes[q]
// convolved with kernels[q]), linear convolution, same-size output.
std::vector<double> spectral_convolve(
    const std::vector<std::vector<double>>& planes,
    const std::vector<std::vector<double>>& kernels,
    const std::vector<double>& weights, int width, int height, int kernel_n);

}  // namespace metatele
