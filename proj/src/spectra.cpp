#include "metatele/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace metatele {

double SpectralCurve::at(double lambda) const {
  if (wavelength.empty()) return 0.0;
  if (lambda <= wavelength.front() || lambda >= wavelength.back()) {
    if (lambda == wavelength.front()) return value.front();
    if (lambda == wavelength.back()) return value.back();
    return 0.0;
  }
  auto it = std::lower_bound(wavelength.begin(), wavelength.end(), lambda);
  const std::size_t i = it - wavelength.begin();
  const double t =
      (lambda - wavelength[i - 1]) / (wavelength[i] - wavelength[i - 1]);
  return value[i - 1] + t * (value[i] - value[i - 1]);
}

SpectralCurve SpectralCurve::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("SpectralCurve: cannot open " + path);
  SpectralCurve c;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    c.wavelength.push_back(std::stod(tok) * nm);
    std::getline(ls, tok, ',');
    c.value.push_back(std::stod(tok));
  }
  return c;
}

void SpectralCurve::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("SpectralCurve: cannot write " + path);
  out << "wavelength_nm,value\n";
  out.precision(10);
  for (std::size_t i = 0; i < wavelength.size(); ++i)
    out << wavelength[i] / nm << "," << value[i] << "\n";
}

SpectralCurve SpectralCurve::gaussian(double center, double fwhm, double peak,
                                      double lo, double hi, int samples) {
  SpectralCurve c;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  for (int i = 0; i < samples; ++i) {
    const double l = lo + (hi - lo) * i / (samples - 1);
    c.wavelength.push_back(l);
    const double d = (l - center) / sigma;
    c.value.push_back(peak * std::exp(-0.5 * d * d));
  }
  return c;
}

RgbSpectra RgbSpectra::default_sensor() {
  // Synthetic but plausible CMOS color responses (broad, overlapping).
  RgbSpectra s;
  s.r = SpectralCurve::gaussian(610 * nm, 90 * nm, 0.85);
  s.g = SpectralCurve::gaussian(540 * nm, 85 * nm, 0.95);
  s.b = SpectralCurve::gaussian(470 * nm, 80 * nm, 0.80);
  return s;
}

RgbSpectra RgbSpectra::default_display() {
  // Synthetic smooth display primaries for the RGB -> spectrum upsampling
  // basis. Non-negative and zero outside the visible band by construction.
  RgbSpectra s;
  s.r = SpectralCurve::gaussian(625 * nm, 45 * nm, 1.0);
  s.g = SpectralCurve::gaussian(545 * nm, 40 * nm, 1.0);
  s.b = SpectralCurve::gaussian(462 * nm, 35 * nm, 1.0);
  return s;
}

RgbSpectra RgbSpectra::load(const std::string& dir, const std::string& stem) {
  RgbSpectra s;
  s.r = SpectralCurve::load_csv(dir + "/" + stem + "_r.csv");
  s.g = SpectralCurve::load_csv(dir + "/" + stem + "_g.csv");
  s.b = SpectralCurve::load_csv(dir + "/" + stem + "_b.csv");
  return s;
}

void RgbSpectra::save(const std::string& dir, const std::string& stem) const {
  r.save_csv(dir + "/" + stem + "_r.csv");
  g.save_csv(dir + "/" + stem + "_g.csv");
  b.save_csv(dir + "/" + stem + "_b.csv");
}

std::vector<QuadratureNode> color_quadrature(int count, double lo, double hi) {
  std::vector<QuadratureNode> nodes;
  const double dl = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i)
    nodes.push_back({lo + i * dl, dl});
  return nodes;
}

std::vector<QuadratureNode> band_quadrature(double center, double fwhm,
                                            int count) {
  // Nodes spanning +-FWHM with Gaussian weights, normalized so the weights
  // sum to the band's equivalent width.
  std::vector<QuadratureNode> nodes;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double half = fwhm;
  double wsum = 0.0;
  for (int i = 0; i < count; ++i) {
    const double l = center - half + 2.0 * half * i / (count - 1);
    const double d = (l - center) / sigma;
    const double w = std::exp(-0.5 * d * d);
    nodes.push_back({l, w});
    wsum += w;
  }
  const double width = sigma * std::sqrt(2.0 * kPi);
  for (auto& n : nodes) n.weight *= width / wsum;
  return nodes;
}

}  // namespace metatele
