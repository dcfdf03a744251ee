#include "metatele/nanocell.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "metatele/parallel.hpp"

namespace metatele {

namespace {

std::uint64_t fnv1a(const void* buf, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(buf);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void NanocellLut::validate() const {
  if (entries.empty()) throw DomainError("NanocellLut: empty table");
  double prev = 0.0;
  double phase_min = entries.front().phase, phase_max = entries.front().phase;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.radius < 50 * nm - 1e-12 || e.radius > 130 * nm + 1e-12) {
      std::ostringstream os;
      os << "NanocellLut: radius " << e.radius / nm
         << " nm outside the fabricable range [50, 130] nm";
      throw DomainError(os.str());
    }
    if (i > 0 && e.radius <= prev)
      throw DomainError("NanocellLut: radii must be strictly increasing");
    if (i > 0 && std::lround(e.radius / (0.1 * nm)) ==
                     std::lround(prev / (0.1 * nm)))
      throw DomainError(
          "NanocellLut: radii must stay distinct at the 0.1 nm layout "
          "resolution");
    prev = e.radius;
    if (e.transmittance < 0.0 || e.transmittance > 1.0)
      throw DomainError("NanocellLut: transmittance outside [0, 1]");
    phase_min = std::min(phase_min, e.phase);
    phase_max = std::max(phase_max, e.phase);
  }
  // Full phase coverage, up to the discrete spacing of the table.
  const double need =
      2.0 * kPi * (1.0 - 1.5 / static_cast<double>(entries.size()));
  if (phase_max - phase_min < need) {
    std::ostringstream os;
    os << "NanocellLut: phase span " << phase_max - phase_min
       << " rad does not cover 2*pi";
    throw DomainError(os.str());
  }
}

std::uint64_t NanocellLut::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& e : entries) {
    h = fnv1a(&e.radius, sizeof e.radius, h);
    h = fnv1a(&e.transmittance, sizeof e.transmittance, h);
    h = fnv1a(&e.phase, sizeof e.phase, h);
  }
  h = fnv1a(&pillar_height, sizeof pillar_height, h);
  h = fnv1a(&pitch, sizeof pitch, h);
  return h;
}

NanocellLut NanocellLut::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("NanocellLut: cannot open " + path);
  NanocellLut lut;
  std::string line;
  if (!std::getline(in, line))
    throw IoError("NanocellLut: empty file " + path);
  if (line.find("radius_nm") == std::string::npos)
    throw IoError("NanocellLut: missing radius_nm,transmittance,phase_rad header");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    NanocellEntry e;
    if (!std::getline(ls, tok, ',')) continue;
    e.radius = std::stod(tok) * nm;
    if (!std::getline(ls, tok, ',')) throw IoError("NanocellLut: bad row: " + line);
    e.transmittance = std::stod(tok);
    if (!std::getline(ls, tok, ',')) throw IoError("NanocellLut: bad row: " + line);
    e.phase = std::stod(tok);
    lut.entries.push_back(e);
  }
  lut.validate();
  return lut;
}

void NanocellLut::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("NanocellLut: cannot write " + path);
  out << "radius_nm,transmittance,phase_rad\n";
  out.precision(12);
  for (const auto& e : entries)
    out << e.radius / nm << "," << e.transmittance << "," << e.phase << "\n";
}

std::size_t lut_fit_index(double target_phase, const NanocellLut& lut) {
  if (lut.entries.empty()) throw DomainError("lut_fit: empty LUT");
  std::size_t best = 0;
  double best_d = circle_distance(lut.entries[0].phase, target_phase);
  for (std::size_t i = 1; i < lut.entries.size(); ++i) {
    const double d = circle_distance(lut.entries[i].phase, target_phase);
    // Strict improvement only: entries are radius-ascending, so ties keep
    // the smaller radius.
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double lut_fit(double target_phase, const NanocellLut& lut) {
  return lut.entries[lut_fit_index(target_phase, lut)].radius;
}

std::size_t MetasurfaceLayout::pillar_count() const {
  std::size_t c = 0;
  for (auto r : radii)
    if (r != kNoPillar) ++c;
  return c;
}

MetasurfaceLayout synthesize_layout(const PhaseProfile& profile,
                                    const NanocellLut& lut, double aperture,
                                    int workers) {
  lut.validate();
  if (!(aperture > 0)) throw DomainError("synthesize_layout: aperture <= 0");
  MetasurfaceLayout layout;
  layout.pitch = lut.pitch;
  layout.m = static_cast<int>(std::ceil(aperture / lut.pitch));
  layout.aperture = aperture;
  layout.profile_hash = profile.hash();
  layout.lut_hash = lut.hash();
  layout.radii.assign(static_cast<std::size_t>(layout.m) * layout.m,
                      MetasurfaceLayout::kNoPillar);
  const double r_ap = 0.5 * aperture;
  parallel_for(layout.m, workers, [&](std::size_t row) {
    const double y = layout.cell_coord(static_cast<int>(row));
    for (int col = 0; col < layout.m; ++col) {
      const double x = layout.cell_coord(col);
      if (std::hypot(x, y) > r_ap) continue;
      const double target = wrap_2pi(eval_phase(profile, {x, y}));
      const auto& e = lut.entries[lut_fit_index(target, lut)];
      layout.radii[row * layout.m + col] =
          static_cast<std::uint16_t>(std::lround(e.radius / (0.1 * nm)));
    }
  });
  return layout;
}

SampledModulation layout_to_realized_modulation(const MetasurfaceLayout& layout,
                                                const NanocellLut& lut) {
  // Radius (0.1 nm units) -> entry index.
  std::vector<std::pair<std::uint16_t, std::size_t>> table;
  table.reserve(lut.entries.size());
  for (std::size_t i = 0; i < lut.entries.size(); ++i)
    table.emplace_back(
        static_cast<std::uint16_t>(std::lround(lut.entries[i].radius / (0.1 * nm))),
        i);
  std::sort(table.begin(), table.end());

  SampledModulation mod;
  mod.m = layout.m;
  mod.pitch = layout.pitch;
  mod.cells.assign(layout.radii.size(), complexd{});
  for (std::size_t i = 0; i < layout.radii.size(); ++i) {
    const std::uint16_t r = layout.radii[i];
    if (r == MetasurfaceLayout::kNoPillar) continue;
    auto it = std::lower_bound(table.begin(), table.end(),
                               std::make_pair(r, std::size_t{0}));
    if (it == table.end() || it->first != r) {
      std::ostringstream os;
      os << "layout_to_realized_modulation: radius " << r * 0.1
         << " nm not present in the LUT";
      throw DomainError(os.str());
    }
    const auto& e = lut.entries[it->second];
    mod.cells[i] = e.transmittance * std::exp(complexd(0.0, e.phase));
  }
  return mod;
}

std::vector<double> realized_phase_error(const MetasurfaceLayout& layout,
                                         const NanocellLut& lut,
                                         const PhaseProfile& profile) {
  const auto mod = layout_to_realized_modulation(layout, lut);
  std::vector<double> err(mod.cells.size(), 0.0);
  for (int row = 0; row < layout.m; ++row) {
    const double y = layout.cell_coord(row);
    for (int col = 0; col < layout.m; ++col) {
      const std::size_t i = static_cast<std::size_t>(row) * layout.m + col;
      if (layout.radii[i] == MetasurfaceLayout::kNoPillar) continue;
      const double x = layout.cell_coord(col);
      const double ideal = eval_phase(profile, {x, y});
      err[i] = wrap_pi(std::arg(mod.cells[i]) - ideal);
    }
  }
  return err;
}

complexd SampledModulation::box_average(double x, double y,
                                        double half_width) const {
  const double origin = -0.5 * (m - 1) * pitch;
  int c0 = static_cast<int>(std::floor((x - half_width - origin) / pitch + 0.5));
  int c1 = static_cast<int>(std::floor((x + half_width - origin) / pitch + 0.5));
  int r0 = static_cast<int>(std::floor((y - half_width - origin) / pitch + 0.5));
  int r1 = static_cast<int>(std::floor((y + half_width - origin) / pitch + 0.5));
  c0 = std::max(c0, 0);
  r0 = std::max(r0, 0);
  c1 = std::min(c1, m - 1);
  r1 = std::min(r1, m - 1);
  if (c0 > c1 || r0 > r1) {
    // Patch smaller than a cell: nearest cell.
    int c = std::clamp(static_cast<int>(std::lround((x - origin) / pitch)), 0, m - 1);
    int r = std::clamp(static_cast<int>(std::lround((y - origin) / pitch)), 0, m - 1);
    return at(r, c);
  }
  complexd acc{};
  int count = 0;
  for (int r = r0; r <= r1; ++r)
    for (int c = c0; c <= c1; ++c) {
      acc += at(r, c);
      ++count;
    }
  return acc / static_cast<double>(count);
}

void MetasurfaceLayout::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("MetasurfaceLayout: cannot write " + path);
  out << "row,col,radius_nm\n";
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) {
      const std::uint16_t v = at(r, c);
      if (v == kNoPillar) continue;
      out << r << "," << c << "," << v * 0.1 << "\n";
    }
}

void MetasurfaceLayout::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("MetasurfaceLayout: cannot write " + path);
  const char magic[8] = {'M', 'T', 'L', 'A', 'Y', '0', '1', '\0'};
  out.write(magic, 8);
  const std::uint32_t mm32 = static_cast<std::uint32_t>(m);
  out.write(reinterpret_cast<const char*>(&mm32), 4);
  const double pitch_nm = pitch / nm;
  out.write(reinterpret_cast<const char*>(&pitch_nm), 8);
  out.write(reinterpret_cast<const char*>(radii.data()),
            static_cast<std::streamsize>(radii.size() * 2));
}

MetasurfaceLayout MetasurfaceLayout::load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("MetasurfaceLayout: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "MTLAY01\0", 8) != 0)
    throw IoError("MetasurfaceLayout: bad magic in " + path);
  std::uint32_t mm32 = 0;
  double pitch_nm = 0;
  in.read(reinterpret_cast<char*>(&mm32), 4);
  in.read(reinterpret_cast<char*>(&pitch_nm), 8);
  MetasurfaceLayout layout;
  layout.m = static_cast<int>(mm32);
  layout.pitch = pitch_nm * nm;
  layout.radii.resize(static_cast<std::size_t>(layout.m) * layout.m);
  in.read(reinterpret_cast<char*>(layout.radii.data()),
          static_cast<std::streamsize>(layout.radii.size() * 2));
  if (!in) throw IoError("MetasurfaceLayout: truncated file " + path);
  return layout;
}

}  // namespace metatele
