#include "metatele/noise.hpp"

#include <cmath>

namespace metatele {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

PixelRng::PixelRng(std::uint64_t seed, std::uint64_t image_index,
                   std::uint64_t pixel_index) {
  // Mix the key into a per-pixel state.
  std::uint64_t x = seed;
  std::uint64_t a = splitmix64(x);
  x ^= image_index * 0xD6E8FEB86659FD93ULL;
  std::uint64_t b = splitmix64(x);
  x ^= pixel_index * 0xA5CB3B2D14EAFD17ULL + (image_index << 32);
  std::uint64_t c = splitmix64(x);
  state_ = a ^ (b * 0x2545F4914F6CDD1DULL) ^ c;
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t PixelRng::next_u64() { return splitmix64(state_); }

double PixelRng::next_double() {
  return (next_u64() >> 11) * 0x1.0p-53;
}

double PixelRng::next_gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller.
  double u1 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  have_spare_ = true;
  spare_ = r * std::sin(2.0 * kPi * u2);
  return r * std::cos(2.0 * kPi * u2);
}

std::uint64_t PixelRng::next_poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < 30.0) {
    // Inversion by sequential search.
    const double l = std::exp(-mean);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      p *= next_double();
    } while (p > l && k < 10000);
    return k - 1;
  }
  // PTRS transformed rejection (Hormann 1993).
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = next_double() - 0.5;
    double v = next_double();
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (kf < 0) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
    if (us < 0.013 && v > us) continue;
    const double lg =
        std::lgamma(kf + 1.0);
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * std::log(mean) - mean - lg)
      return static_cast<std::uint64_t>(kf);
  }
}

}  // namespace metatele
