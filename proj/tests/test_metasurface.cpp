#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "metatele/config.hpp"
#include "metatele/io.hpp"
#include "metatele/nanocell.hpp"
#include "metatele/psf.hpp"
#include "oracles.hpp"

using namespace metatele;

namespace {

std::string data_path(const std::string& rel) {
  return std::string(METATELE_SOURCE_DIR) + "/" + rel;
}

NanocellLut shipped_lut() {
  return NanocellLut::load_csv(data_path("data/lut/nanocell_lut_synthetic.csv"));
}

// LUT with K phases uniform over [0, 2pi), radii spread over the range.
NanocellLut uniform_lut(int k) {
  NanocellLut lut;
  for (int i = 0; i < k; ++i) {
    NanocellEntry e;
    e.radius = (50.0 + 80.0 * i / (k - 1)) * nm;
    e.phase = 2.0 * kPi * i / k;
    e.transmittance = 1.0;
    lut.entries.push_back(e);
  }
  return lut;
}

double on_axis_strehl(const SystemGeometry& g, const PsfOptions& opts) {
  const double zf = focal_plane(g, g.lambda0);
  return psf(g, {zf, g.lambda0, {}}, opts).strehl;
}

}  // namespace

TEST_CASE("eval_phase: quadratic center and a hand-computed sample") {
  const auto p = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  CHECK(eval_phase(p, {}) == doctest::Approx(0.0));
  // phi(0.3 mm) = (2pi/532nm) * (0.3mm)^2 / (4mm); one-line scalar check.
  const double expect = 2.0 * kPi / (532e-9) * (0.3e-3 * 0.3e-3) / (4e-3);
  const double got = eval_phase(p, {0.3 * mm, 0.0});
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(wrap_2pi(got) == doctest::Approx(wrap_2pi(expect)).epsilon(1e-9));
  // Radially symmetric: any same-norm point matches.
  CHECK(eval_phase(p, {0.18 * mm, 0.24 * mm}) ==
        doctest::Approx(got).epsilon(1e-12));
}

TEST_CASE("eval_phase: optimized polynomial is quadratic-dominated near axis") {
  const auto poly =
      PhaseProfile::polynomial(production_polynomial_coeffs(), 532 * nm);
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  for (double r : {5 * um, 10 * um, 20 * um}) {
    const double pp = eval_phase_radial(poly, r);
    const double pq = eval_phase_radial(quad, r);
    CHECK(pp == doctest::Approx(pq).epsilon(2e-3));
  }
}

TEST_CASE("fit_quadratic: the optimized polynomial fits f = -2 mm") {
  const auto poly =
      PhaseProfile::polynomial(production_polynomial_coeffs(), 532 * nm);
  const auto fit = fit_quadratic(poly, 0.8 * mm);
  CHECK(fit.focal == doctest::Approx(-2.0 * mm).epsilon(0.05));
  MESSAGE("fitted f2 = ", fit.focal / mm, " mm, residual ", fit.rms_residual,
          " rad");
}

TEST_CASE("fit_quadratic: exact quadratic input is a fixed point") {
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto fit = fit_quadratic(quad, 0.8 * mm);
  CHECK(fit.focal == doctest::Approx(-2.0 * mm).epsilon(1e-12));
  CHECK(fit.rms_residual < 1e-9);
}

TEST_CASE("fit_quadratic: pure c2 profile matches the disk-moment formula") {
  std::array<double, 7> c{};
  c[1] = 0.35;  // c2 only
  const auto p = PhaseProfile::polynomial(c, 532 * nm);
  const double R = 0.4;  // mm
  // Piston-free least squares of c2 r^4 against a r^2 + b over the disk
  // gives the classic focus balance a = c2 R^2 (from the moment system
  // <r^2> = R^2/2, <r^4> = R^4/3, <r^6> = R^6/4).
  const double a_mm = c[1] * R * R;  // 1/mm
  const double k0 = 2.0 * kPi / 532e-9;
  const double a_si = a_mm * 2.0 * kPi / (532e-9 / 1e-3) / (1e-3 * 1e-3);
  const double expect_f = -k0 / (2.0 * a_si);
  const auto fit = fit_quadratic(p, 2 * R * mm);
  CHECK(fit.focal == doctest::Approx(expect_f).epsilon(1e-9));
}

TEST_CASE("lut_fit: exact phase hit returns that entry") {
  const auto lut = shipped_lut();
  for (std::size_t i : {std::size_t{0}, lut.entries.size() / 2,
                        lut.entries.size() - 1}) {
    CHECK(lut_fit(lut.entries[i].phase, lut) ==
          doctest::Approx(lut.entries[i].radius));
  }
}

TEST_CASE("lut_fit: uniform-phase table bounds the worst-case error") {
  const int k = 16;
  const auto lut = uniform_lut(k);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double target = dist(rng);
    const auto idx = lut_fit_index(target, lut);
    // Exhaustive reference.
    std::size_t ref = 0;
    double best = 1e300;
    for (std::size_t j = 0; j < lut.entries.size(); ++j) {
      const double d = circle_distance(lut.entries[j].phase, target);
      if (d < best) {
        best = d;
        ref = j;
      }
    }
    CHECK(idx == ref);
    worst = std::max(worst, circle_distance(lut.entries[idx].phase, target));
  }
  CHECK(worst <= kPi / k + 1e-12);
}

TEST_CASE("lut_fit: exhaustive equality on random tables and targets") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> phase(-8.0, 8.0);
  std::uniform_real_distribution<double> target(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    NanocellLut lut;
    const int k = 5 + static_cast<int>(rng() % 60);
    for (int i = 0; i < k; ++i) {
      NanocellEntry e;
      e.radius = (50.0 + 80.0 * i / (k - 1)) * nm;
      e.phase = phase(rng);
      e.transmittance = 1.0;
      lut.entries.push_back(e);
    }
    for (int i = 0; i < 200; ++i) {
      const double t = target(rng);
      const auto idx = lut_fit_index(t, lut);
      double best = 1e300;
      for (const auto& e : lut.entries)
        best = std::min(best, circle_distance(e.phase, t));
      CHECK(circle_distance(lut.entries[idx].phase, t) ==
            doctest::Approx(best));
    }
  }
}

TEST_CASE("lut_fit: equidistant tie breaks to the smaller radius") {
  NanocellLut lut;
  NanocellEntry a, b;
  a.radius = 60 * nm;
  a.phase = 0.0;
  b.radius = 100 * nm;
  b.phase = kPi;  // both pi/2 away from target pi/2... use target exactly
  lut.entries = {a, b};
  // Target at pi/2: distance pi/2 to both entries.
  CHECK(lut_fit(kPi / 2, lut) == doctest::Approx(a.radius));
  CHECK(lut_fit(-kPi / 2, lut) == doctest::Approx(a.radius));
}

TEST_CASE("synthesize_layout: production aperture yields ~2667 cells") {
  const auto lut = shipped_lut();
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto layout = synthesize_layout(quad, lut, 0.8 * mm, 2);
  CHECK(layout.m == 2667);
  for (int r = 0; r < layout.m; ++r)
    for (int c = 0; c < layout.m; ++c) {
      const auto v = layout.at(r, c);
      if (v == MetasurfaceLayout::kNoPillar) continue;
      CHECK(v * 0.1 >= 50.0);
      CHECK(v * 0.1 <= 130.0);
    }
  // No-pillar cells only outside the aperture.
  const double r_ap = 0.4 * mm;
  for (int r = 0; r < layout.m; r += 97)
    for (int c = 0; c < layout.m; c += 89) {
      const double x = layout.cell_coord(c), y = layout.cell_coord(r);
      const bool in = std::hypot(x, y) <= r_ap;
      CHECK((layout.at(r, c) != MetasurfaceLayout::kNoPillar) == in);
    }
}

TEST_CASE("synthesize_layout: constant target maps to one radius") {
  const auto lut = shipped_lut();
  const auto zero = PhaseProfile::polynomial({}, 532 * nm);
  const auto layout = synthesize_layout(zero, lut, 50 * um);
  std::uint16_t first = MetasurfaceLayout::kNoPillar;
  for (auto v : layout.radii) {
    if (v == MetasurfaceLayout::kNoPillar) continue;
    if (first == MetasurfaceLayout::kNoPillar) first = v;
    CHECK(v == first);
  }
  CHECK(first != MetasurfaceLayout::kNoPillar);
}

TEST_CASE("synthesize_layout: deterministic and order-independent") {
  auto lut = shipped_lut();
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto a = synthesize_layout(quad, lut, 0.12 * mm, 1);
  const auto b = synthesize_layout(quad, lut, 0.12 * mm, 3);
  CHECK(a.radii == b.radii);
  // Permuting LUT entry order must not change the outcome; the loader
  // enforces ascending radii, so emulate a permuted evaluation by fitting
  // against a reversed copy in a scratch structure.
  NanocellLut rev = lut;
  std::reverse(rev.entries.begin(), rev.entries.end());
  // Re-sort to restore the invariant; contents identical => same layout.
  std::sort(rev.entries.begin(), rev.entries.end(),
            [](const NanocellEntry& x, const NanocellEntry& y) {
              return x.radius < y.radius;
            });
  const auto c = synthesize_layout(quad, rev, 0.12 * mm, 2);
  CHECK(a.radii == c.radii);

  // Byte-identical export for identical inputs.
  a.save_binary("layout_a.bin");
  b.save_binary("layout_b.bin");
  CHECK(io::hash_file("layout_a.bin") == io::hash_file("layout_b.bin"));
  std::remove("layout_a.bin");
  std::remove("layout_b.bin");
}

TEST_CASE("layout binary round-trips") {
  const auto lut = shipped_lut();
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto layout = synthesize_layout(quad, lut, 0.1 * mm);
  layout.save_binary("layout_rt.bin");
  const auto back = MetasurfaceLayout::load_binary("layout_rt.bin");
  CHECK(back.m == layout.m);
  CHECK(back.pitch == doctest::Approx(layout.pitch).epsilon(1e-15));
  CHECK(back.radii == layout.radii);
  std::remove("layout_rt.bin");
}

TEST_CASE("realized modulation: phase error bounded by the LUT spacing") {
  const auto lut = shipped_lut();
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto layout = synthesize_layout(quad, lut, 0.3 * mm, 2);
  const auto err = realized_phase_error(layout, lut, quad);
  // Half the largest adjacent phase gap on the wrapped circle.
  std::vector<double> phases;
  for (const auto& e : lut.entries) phases.push_back(wrap_2pi(e.phase));
  std::sort(phases.begin(), phases.end());
  double max_gap = 2.0 * kPi - (phases.back() - phases.front());
  for (std::size_t i = 1; i < phases.size(); ++i)
    max_gap = std::max(max_gap, phases[i] - phases[i - 1]);
  for (double e : err) CHECK(std::abs(e) <= 0.5 * max_gap + 1e-12);
}

TEST_CASE("realized modulation: ideal continuous table has zero error") {
  // A dense LUT with T = 1 and phase exactly matching the targets it will
  // be asked for: error collapses to the quantization of 512 entries (the
  // densest table distinguishable at the 0.1 nm layout resolution).
  NanocellLut lut;
  const int k = 512;
  for (int i = 0; i < k; ++i) {
    NanocellEntry e;
    e.radius = (50.0 + 80.0 * i / (k - 1)) * nm;
    e.phase = 2.0 * kPi * i / k;
    e.transmittance = 1.0;
    lut.entries.push_back(e);
  }
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto layout = synthesize_layout(quad, lut, 0.2 * mm);
  const auto err = realized_phase_error(layout, lut, quad);
  for (double e : err) CHECK(std::abs(e) <= kPi / k + 1e-12);
}

TEST_CASE("realized modulation: unknown radius is rejected") {
  const auto lut = shipped_lut();
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  auto layout = synthesize_layout(quad, lut, 0.1 * mm);
  layout.radii[layout.radii.size() / 2] = 1;  // 0.1 nm: not in the table
  CHECK_THROWS_AS(layout_to_realized_modulation(layout, lut), DomainError);
}

TEST_CASE("realized modulation: transmittance dips reduce carried power") {
  NanocellLut lut = uniform_lut(32);
  const auto quad = PhaseProfile::quadratic(-2 * mm, 532 * nm);
  const auto layout = synthesize_layout(quad, lut, 0.1 * mm);
  const auto full = layout_to_realized_modulation(layout, lut);
  // Same table with one entry's transmittance halved.
  NanocellLut dipped = lut;
  dipped.entries[10].transmittance = 0.5;
  const auto dip = layout_to_realized_modulation(layout, dipped);
  double p_full = 0.0, p_dip = 0.0;
  for (const auto& v : full.cells) p_full += std::norm(v);
  for (const auto& v : dip.cells) p_dip += std::norm(v);
  CHECK(p_dip < p_full);
  // The missing power equals the count of affected cells times (1 - 0.25).
  std::size_t affected = 0;
  const std::uint16_t key = static_cast<std::uint16_t>(
      std::lround(lut.entries[10].radius / (0.1 * nm)));
  for (auto r : layout.radii)
    if (r == key) ++affected;
  CHECK(p_full - p_dip == doctest::Approx(affected * (1.0 - 0.25)));
}

TEST_CASE("as-fabricated PSF stays within 5% Strehl of the ideal profile") {
  const auto lut = shipped_lut();
  auto g = production_geometry();
  const auto layout = synthesize_layout(g.profile, lut, 0.8 * mm, 2);
  const auto realized = layout_to_realized_modulation(layout, lut);
  PsfOptions opts;
  opts.n = 512;
  const double s_ideal = on_axis_strehl(g, opts);
  PsfOptions ropts = opts;
  ropts.realized = &realized;
  const double s_real = on_axis_strehl(g, ropts);
  CHECK(std::abs(s_real - s_ideal) <= 0.05);
  MESSAGE("ideal strehl ", s_ideal, " realized ", s_real);
}

TEST_CASE("three power-matched profiles give comparable on-axis quality") {
  PsfOptions opts;
  opts.n = 512;
  std::vector<double> strehls;
  for (auto kind : {ProfileKind::kQuadratic, ProfileKind::kHyperbolic,
                    ProfileKind::kSpherical}) {
    auto g = production_geometry();
    switch (kind) {
      case ProfileKind::kQuadratic:
        g.profile = PhaseProfile::quadratic(-2 * mm, g.lambda0);
        break;
      case ProfileKind::kHyperbolic:
        g.profile = PhaseProfile::hyperbolic(-2 * mm, g.lambda0);
        break;
      default:
        g.profile = PhaseProfile::spherical(-2 * mm, g.lambda0);
        break;
    }
    strehls.push_back(on_axis_strehl(g, opts));
  }
  for (double a : strehls)
    for (double b : strehls) CHECK(std::abs(a - b) <= 0.10);
}

TEST_CASE("nanocell LUT invariants are enforced") {
  NanocellLut lut = uniform_lut(16);
  lut.entries[3].radius = 20 * nm;  // outside [50, 130]
  CHECK_THROWS_AS(lut.validate(), DomainError);
  lut = uniform_lut(16);
  lut.entries[5].radius = lut.entries[4].radius;  // not strictly increasing
  CHECK_THROWS_AS(lut.validate(), DomainError);
  lut = uniform_lut(16);
  for (auto& e : lut.entries) e.phase *= 0.4;  // span collapses
  CHECK_THROWS_AS(lut.validate(), DomainError);
}

TEST_CASE("LUT CSV round-trips through the shipped format") {
  const auto lut = shipped_lut();
  lut.save_csv("lut_rt.csv");
  const auto back = NanocellLut::load_csv("lut_rt.csv");
  REQUIRE(back.entries.size() == lut.entries.size());
  for (std::size_t i = 0; i < lut.entries.size(); ++i) {
    CHECK(back.entries[i].radius ==
          doctest::Approx(lut.entries[i].radius).epsilon(1e-9));
    CHECK(back.entries[i].phase ==
          doctest::Approx(lut.entries[i].phase).epsilon(1e-9));
  }
  std::remove("lut_rt.csv");
}
