#include "metatele/mtf.hpp"

#include <cmath>
#include <fstream>

#include "metatele/fft.hpp"

namespace metatele {

MtfCurve mtf_of_image(const std::vector<double>& img, int n, double pitch) {
  std::vector<complexd> spec(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) spec[i] = img[i];
  fft2(spec, n, n);
  const double dc = std::abs(spec[0]);
  if (!(dc > 0.0)) throw DomainError("mtf: zero-power image");

  // Radial average over integer-radius annuli in bin units.
  const int nbins = n / 2;
  std::vector<double> acc(nbins, 0.0);
  std::vector<int> cnt(nbins, 0);
  for (int r = 0; r < n; ++r) {
    const int fr = (r < (n + 1) / 2) ? r : r - n;
    for (int c = 0; c < n; ++c) {
      const int fc = (c < (n + 1) / 2) ? c : c - n;
      const int bin = static_cast<int>(std::lround(std::hypot(fr, fc)));
      if (bin >= nbins) continue;
      acc[bin] += std::abs(spec[static_cast<std::size_t>(r) * n + c]);
      cnt[bin] += 1;
    }
  }
  MtfCurve out;
  out.frequency.reserve(nbins);
  out.mtf.reserve(nbins);
  const double df = 1.0 / (n * pitch);
  for (int b = 0; b < nbins; ++b) {
    if (cnt[b] == 0) continue;
    out.frequency.push_back(b * df);
    out.mtf.push_back(acc[b] / cnt[b] / dc);
  }
  return out;
}

MtfCurve mtf(const PsfSample& sample) {
  return mtf_of_image(sample.intensity, sample.n, sample.pitch);
}

double MtfCurve::cutoff(double threshold) const {
  if (mtf.empty()) return 0.0;
  for (std::size_t i = 1; i < mtf.size(); ++i) {
    if (mtf[i] < threshold) {
      // Interpolate the crossing between bins i-1 and i.
      const double m0 = mtf[i - 1], m1 = mtf[i];
      if (m0 <= threshold) return frequency[i - 1];
      const double t = (m0 - threshold) / (m0 - m1);
      return frequency[i - 1] + t * (frequency[i] - frequency[i - 1]);
    }
  }
  return frequency.back();
}

void MtfCurve::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("MtfCurve: cannot write " + path);
  out << "frequency_lp_per_mm,mtf\n";
  out.precision(10);
  for (std::size_t i = 0; i < mtf.size(); ++i)
    out << frequency[i] * 1e-3 << "," << mtf[i] << "\n";
}

}  // namespace metatele
