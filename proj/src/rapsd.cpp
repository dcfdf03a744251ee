#include "metatele/rapsd.hpp"

#include <cmath>
#include <fstream>

#include "metatele/fft.hpp"

namespace metatele {

RapsdCurve rapsd(const std::vector<double>& image, int width, int height,
                 double pixel_pitch) {
  if (image.size() != static_cast<std::size_t>(width) * height)
    throw DomainError("rapsd: size mismatch");
  for (double v : image)
    if (!std::isfinite(v)) throw DomainError("rapsd: non-finite sample");

  std::vector<complexd> spec(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) spec[i] = image[i];
  fft2(spec, height, width);

  // Bins extend into the spectrum corners so that summing
  // mean_power * bin_count reproduces the total spectral power exactly.
  const int nbins = static_cast<int>(std::ceil(
                        0.5 * std::hypot(1.0, 1.0) * std::min(width, height))) +
                    2;
  RapsdCurve out;
  out.mean_power.assign(nbins, 0.0);
  out.bin_count.assign(nbins, 0);
  std::vector<double> acc(nbins, 0.0);
  for (int r = 0; r < height; ++r) {
    const double fr =
        (r < (height + 1) / 2 ? r : r - height) / static_cast<double>(height);
    for (int c = 0; c < width; ++c) {
      const double fc =
          (c < (width + 1) / 2 ? c : c - width) / static_cast<double>(width);
      // Radius in units of the smaller dimension's bin spacing.
      const double rad = std::hypot(fr, fc) * std::min(width, height);
      const int bin = static_cast<int>(std::lround(rad));
      if (bin >= nbins) continue;
      acc[bin] += std::norm(spec[static_cast<std::size_t>(r) * width + c]);
      out.bin_count[bin] += 1;
    }
  }
  const double df_px = 1.0 / std::min(width, height);
  for (int b = 0; b < nbins; ++b) {
    out.freq_cycles_per_px.push_back(b * df_px);
    out.freq_cycles_per_m.push_back(b * df_px / pixel_pitch);
    out.mean_power[b] = out.bin_count[b] ? acc[b] / out.bin_count[b] : 0.0;
  }
  return out;
}

double RapsdCurve::total_power() const {
  double acc = 0.0;
  for (std::size_t b = 0; b < mean_power.size(); ++b)
    acc += mean_power[b] * bin_count[b];
  return acc;
}

void RapsdCurve::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("RapsdCurve: cannot write " + path);
  out << "freq_cycles_per_px,freq_lp_per_mm,mean_power,bin_count\n";
  out.precision(10);
  for (std::size_t b = 0; b < mean_power.size(); ++b)
    out << freq_cycles_per_px[b] << "," << freq_cycles_per_m[b] * 1e-3 << ","
        << mean_power[b] << "," << bin_count[b] << "\n";
}

}  // namespace metatele
