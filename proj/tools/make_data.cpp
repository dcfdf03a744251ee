// Regenerates the repository's checked-in data files: the synthetic
// nanocell LUT, the default sensor/display spectral curves, and the
// prototype geometry/sensor configurations.
#include <cmath>
#include <cstdio>

#include "metatele/config.hpp"
#include "metatele/io.hpp"
#include "metatele/nanocell.hpp"

using namespace metatele;

namespace {

// Synthetic 81-entry nanocell table: a smooth, monotone phase ramp covering
// a bit over 2*pi across the fabricable radius range, with high but
// slightly dipping transmittance. Stands in for a full-wave unit-cell
// sweep; only the shape of the mapping matters to the fitting pipeline.
NanocellLut synthetic_lut() {
  NanocellLut lut;
  for (int i = 0; i <= 80; ++i) {
    NanocellEntry e;
    const double t = i / 80.0;
    e.radius = (50.0 + i) * nm;
    e.phase = 2.2 * kPi * std::pow(t, 1.12) - kPi;
    e.transmittance = 0.955 + 0.025 * std::cos(1.7 * kPi * t) -
                      0.05 * std::exp(-std::pow((t - 0.55) / 0.09, 2));
    lut.entries.push_back(e);
  }
  lut.validate();
  return lut;
}

}  // namespace

int main() {
  io::ensure_directory("data/lut");
  io::ensure_directory("data/spectra");
  io::ensure_directory("data/configs");

  synthetic_lut().save_csv("data/lut/nanocell_lut_synthetic.csv");
  RgbSpectra::default_sensor().save("data/spectra", "sensor");
  RgbSpectra::default_display().save("data/spectra", "display");

  save_geometry("data/configs/metatele-proto.json", production_geometry());
  save_geometry("data/configs/metatele-proto-poly.json",
                production_geometry_polynomial());
  save_sensor("data/configs/sensor-default.json", SensorModel{});

  std::puts("data files written under data/");
  return 0;
}
