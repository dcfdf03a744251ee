#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metatele/modulation.hpp"
#include "metatele/phase_profile.hpp"

namespace metatele {

struct NanocellEntry {
  double radius = 0.0;         // m
  double transmittance = 1.0;  // [0, 1]
  double phase = 0.0;          // rad
};

// Precomputed unit-cell response table: pillar radius -> T e^{j phi}.
struct NanocellLut {
  std::vector<NanocellEntry> entries;
  double pillar_height = 775 * nm;
  double pitch = 300 * nm;
  std::string material = "SiN";

  void validate() const;
  std::uint64_t hash() const;

  static NanocellLut load_csv(const std::string& path);
  void save_csv(const std::string& path) const;
};

// Index of the LUT entry minimizing the wrapped angular distance
// |angle(C_i) - target| on the circle. Ties break to the smaller radius.
std::size_t lut_fit_index(double target_phase, const NanocellLut& lut);
double lut_fit(double target_phase, const NanocellLut& lut);  // radius, m

// Nanopillar radius grid on the cell pitch. Cells outside the aperture
// carry the no-pillar sentinel.
struct MetasurfaceLayout {
  static constexpr std::uint16_t kNoPillar = 0xFFFF;

  int m = 0;                         // cells across
  double pitch = 300 * nm;           // m
  double aperture = 0.0;             // m
  std::uint64_t profile_hash = 0;
  std::uint64_t lut_hash = 0;
  std::vector<std::uint16_t> radii;  // units of 0.1 nm

  std::uint16_t at(int row, int col) const {
    return radii[static_cast<std::size_t>(row) * m + col];
  }
  double cell_coord(int i) const { return (i - 0.5 * (m - 1)) * pitch; }
  std::size_t pillar_count() const;

  void save_csv(const std::string& path) const;
  void save_binary(const std::string& path) const;
  static MetasurfaceLayout load_binary(const std::string& path);
};

// Deterministic layout synthesis: each in-aperture cell gets the LUT entry
// closest in wrapped phase to the ideal profile at the cell center.
MetasurfaceLayout synthesize_layout(const PhaseProfile& profile,
                                    const NanocellLut& lut, double aperture,
                                    int workers = 1);

// Reconstructs the complex modulation the layout realizes.
// Throws on radii absent from the LUT.
SampledModulation layout_to_realized_modulation(const MetasurfaceLayout& layout,
                                                const NanocellLut& lut);

// Wrapped phase error of the realized modulation against the ideal profile,
// per cell (0 outside the aperture).
std::vector<double> realized_phase_error(const MetasurfaceLayout& layout,
                                         const NanocellLut& lut,
                                         const PhaseProfile& profile);

}  // namespace metatele
