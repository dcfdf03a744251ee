#pragma once

#include <vector>

#include "metatele/common.hpp"

namespace metatele {

// Sampled 2-D complex wavefront on an N x N grid with physical pitch.
// Sample (row, col) sits at physical position
//   x = (col - N/2) * pitch + origin.x
//   y = (row - N/2) * pitch + origin.y
// Fields are immutable value types: operations return new fields.
class ComplexField {
 public:
  ComplexField(int n, double pitch, double wavelength, Vec2 origin = {});

  int n() const { return n_; }
  double pitch() const { return pitch_; }
  double wavelength() const { return wavelength_; }
  Vec2 origin() const { return origin_; }
  double extent() const { return n_ * pitch_; }

  const std::vector<complexd>& data() const { return data_; }
  std::vector<complexd>& data() { return data_; }

  complexd at(int row, int col) const { return data_[idx(row, col)]; }
  complexd& at(int row, int col) { return data_[idx(row, col)]; }
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row) * n_ + col;
  }

  double coord(int i) const { return (i - n_ / 2) * pitch_; }
  double x_of(int col) const { return coord(col) + origin_.x; }
  double y_of(int row) const { return coord(row) + origin_.y; }

  // Sum of |amplitude|^2 over the grid (no pitch^2 weight).
  double total_power() const;

  // Scales so that total_power() == 1. Throws on a zero field.
  void normalize_power();

 private:
  int n_;
  double pitch_;
  double wavelength_;
  Vec2 origin_;
  std::vector<complexd> data_;
};

// Circular aperture transmittance. `transmittance` outside `diameter` is
// exactly zero; inside it defaults to 1 but may carry any value in [0, 1]
// via the soft-edge fraction of boundary pixels.
struct ApertureMask {
  double diameter = 0.0;

  // Transmittance at a physical point. Hard-edged disk.
  double transmittance(Vec2 p) const {
    return p.norm() <= 0.5 * diameter ? 1.0 : 0.0;
  }
};

}  // namespace metatele
