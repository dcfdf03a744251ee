#pragma once

#include <cstdint>

#include "metatele/common.hpp"

namespace metatele {

// Counter-based random stream keyed by (seed, image index, pixel index):
// every pixel owns an independent deterministic stream, so noise is
// reproducible bit-for-bit under any parallel schedule.
class PixelRng {
 public:
  PixelRng(std::uint64_t seed, std::uint64_t image_index,
           std::uint64_t pixel_index);

  std::uint64_t next_u64();
  double next_double();  // [0, 1)
  double next_gaussian();
  // Poisson sample: inversion for small means, PTRS transformed rejection
  // for large ones.
  std::uint64_t next_poisson(double mean);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace metatele
