#include <cmath>
#include <random>

#include "doctest.h"
#include "metatele/config.hpp"
#include "metatele/focus_zoom.hpp"
#include "metatele/mtf.hpp"
#include "metatele/psf.hpp"
#include "metatele/spot.hpp"
#include "oracles.hpp"

using namespace metatele;

namespace {

// Cross-correlation shift of b relative to a at integer precision plus a
// parabolic sub-pixel refinement along each axis.
Vec2 correlation_shift(const PsfSample& a, const PsfSample& b) {
  REQUIRE(a.n == b.n);
  const int n = a.n;
  int best_r = 0, best_c = 0;
  double best = -1.0;
  // Search a window of plausible shifts.
  const int win = n / 4;
  for (int dr = -win; dr <= win; ++dr)
    for (int dc = -win; dc <= win; ++dc) {
      double acc = 0.0;
      for (int r = std::max(0, -dr); r < std::min(n, n - dr); ++r)
        for (int c = std::max(0, -dc); c < std::min(n, n - dc); ++c)
          acc += a.at(r, c) * b.at(r + dr, c + dc);
      if (acc > best) {
        best = acc;
        best_r = dr;
        best_c = dc;
      }
    }
  return {best_c * a.pitch, best_r * a.pitch};
}

}  // namespace

TEST_CASE("paraxial coefficients: collimated limit") {
  const auto g = production_geometry();
  const auto pc = paraxial_coefficients(g, INFINITY);
  CHECK(pc.a2 == doctest::Approx(-1.0 / (g.f1 - g.m_sep)).epsilon(1e-12));
  CHECK(pc.b2 == doctest::Approx(0.0));
}

TEST_CASE("paraxial coefficients: objective removed leaves free propagation") {
  auto g = production_geometry();
  g.f1 = 1e9;  // effectively no lens
  // With the source-side curvature 1/z0, the field at the eyepiece carries
  // the free-propagation curvature over z0 + m (formula coordinate).
  const double z0 = 400 * mm;
  const auto pc = paraxial_coefficients(g, z0);
  CHECK(pc.a2 == doctest::Approx(1.0 / (g.m_sep + z0)).epsilon(1e-6));
}

TEST_CASE("paraxial coefficients: algebraic identity of B2") {
  const auto g = production_geometry();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    double z0 = dist(rng);
    if (std::abs(z0) < 1e-3) continue;
    z0 *= 1 * 1e3 * mm;  // up to +-2 m, both signs
    try {
      const auto pc = paraxial_coefficients(g, z0);
      const double denom = 1.0 / g.m_sep + 1.0 / z0 - 1.0 / g.f1;
      CHECK(pc.b2 * z0 * denom * g.m_sep == doctest::Approx(1.0).epsilon(1e-9));
    } catch (const DegenerateConjugateError&) {
      // excluded by the identity's own precondition
    }
  }
}

TEST_CASE("paraxial coefficients: degenerate conjugate is flagged") {
  const auto g = production_geometry();
  // 1/m + 1/z0 - 1/f1 = 0  =>  z0 = (1/f1 - 1/m)^{-1} (negative here).
  const double z0 = 1.0 / (1.0 / g.f1 - 1.0 / g.m_sep);
  CHECK_THROWS_AS(paraxial_coefficients(g, z0), DegenerateConjugateError);
}

TEST_CASE("residual defocus vanishes at the focal plane") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  REQUIRE(zf > 0);
  CHECK(std::abs(residual_defocus(g, zf, g.lambda0)) < 1e-10 / g.s_sep);
}

TEST_CASE("residual defocus: red light reduces the eyepiece power term") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  // k0/k = lambda/lambda0 > 1 shrinks the (negative-power) eyepiece term,
  // leaving a positive residual.
  CHECK(residual_defocus(g, zf, 620 * nm) > 0.0);
  // Independent closed-form evaluation at three wavelengths.
  const auto pc = paraxial_coefficients(g, object_depth(zf));
  double prev = -1e300;
  for (double lambda : {480 * nm, 532 * nm, 620 * nm}) {
    const double expect =
        1.0 / g.s_sep + pc.a2 - (lambda / g.lambda0) / (-2 * mm);
    const double got = residual_defocus(g, zf, lambda);
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    CHECK(got > prev);  // strictly monotonic in lambda
    prev = got;
  }
}

TEST_CASE("focal plane: consistency with the defocus root") {
  const auto g = production_geometry();
  for (double lambda : {480 * nm, 532 * nm, 560 * nm, 620 * nm}) {
    const double zf = focal_plane(g, lambda);
    CHECK(std::abs(residual_defocus(g, zf, lambda)) < 1e-10 / g.s_sep);
  }
}

TEST_CASE("focal plane: smooth variation across a 10 nm band") {
  const auto g = production_geometry();
  std::vector<double> zs;
  for (int i = -5; i <= 5; ++i)
    zs.push_back(focal_plane(g, (532.0 + i) * nm));
  // Monotone and smooth: successive differences vary slowly.
  for (std::size_t i = 1; i < zs.size(); ++i) CHECK(zs[i] < zs[i - 1]);
  for (std::size_t i = 2; i < zs.size(); ++i) {
    const double d1 = zs[i - 1] - zs[i - 2];
    const double d2 = zs[i] - zs[i - 1];
    CHECK(std::abs(d2 - d1) < 0.2 * std::abs(d1));
  }
  // The band-edge focal shift behind the measured halo, reported here.
  MESSAGE("focal shift over 532 +- 5 nm: ", (zs.front() - zs.back()) / mm,
          " mm");
}

TEST_CASE("focal plane: production geometry focuses a real object") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  CHECK(zf > 0);
  CHECK(std::isfinite(zf));
  CHECK(zf == doctest::Approx(170.13 * mm).epsilon(1e-3));
}

TEST_CASE("focal plane: afocal configuration is an error") {
  auto g = production_geometry();
  // R = 1/s + 1/m - k0/k /f2 = 0 at the design wavelength requires
  // 1/s = -0.5/mm - 1/m: pick f2 so R = 0 instead: f2 = 1/(1/s + 1/m).
  const double f2 = 1.0 / (1.0 / g.s_sep + 1.0 / g.m_sep);
  g.profile = PhaseProfile::quadratic(f2, g.lambda0);
  CHECK_THROWS_AS(focal_plane(g, g.lambda0), AfocalError);
}

TEST_CASE("magnification and EFL: production golden numbers") {
  const auto g = production_geometry();
  const auto sc = magnification_and_efl(g, 673 * mm);
  CHECK(sc.efl == doctest::Approx(30 * mm).epsilon(1e-12));
  CHECK(g.ttl() == doctest::Approx(13.2 * mm).epsilon(1e-12));
  CHECK(sc.telephoto_ratio == doctest::Approx(0.44).epsilon(1e-12));
}

TEST_CASE("magnification and EFL: collapse to a single element") {
  auto g = production_geometry();
  g.m_sep = 1e-9;
  const auto sc = magnification_and_efl(g, 1e6 * g.f1);
  // EFL formula collapses to s_sep; the free limit |gamma * z0| agrees.
  CHECK(sc.efl == doctest::Approx(g.s_sep).epsilon(1e-6));
  const auto pc = paraxial_coefficients(g, object_depth(1e6 * g.f1));
  CHECK(std::abs(-g.s_sep * pc.b2 * 1e6 * g.f1) ==
        doctest::Approx(g.s_sep).epsilon(1e-5));
}

TEST_CASE("magnification and EFL: the infinite-conjugate limit identity") {
  const auto g = production_geometry();
  const double z0 = 1e6 * g.f1;
  const auto sc = magnification_and_efl(g, z0);
  // |gamma(z0) z0| approaches the EFL with a first-order 1/z0 correction,
  // so the comparison tolerance sits just above it.
  CHECK(std::abs(sc.gamma * z0) == doctest::Approx(sc.efl).epsilon(1e-5));
}

TEST_CASE("magnification and EFL: afocal error when f1 == m") {
  auto g = production_geometry();
  g.m_sep = g.f1;
  CHECK_THROWS_AS(magnification_and_efl(g, 673 * mm), AfocalError);
}

TEST_CASE("psf: near-diffraction-limited on axis at the focal plane") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  PsfOptions opts;
  opts.n = 512;
  const auto s = psf(g, {zf, g.lambda0, {}}, opts);
  CHECK(s.strehl >= 0.8);
  CHECK(s.strehl <= 1.0);
  CHECK(std::abs(s.centroid.x) < g.sensor_pitch);
  CHECK(std::abs(s.centroid.y) < g.sensor_pitch);
  // Grid sums to the transmitted power fraction (hard unit-transmittance
  // stop: ~1).
  double sum = 0.0;
  for (double v : s.intensity) sum += v;
  CHECK(sum == doctest::Approx(s.power_fraction).epsilon(1e-9));
  CHECK(s.power_fraction == doctest::Approx(1.0).epsilon(5e-3));
  for (double v : s.intensity) CHECK(v >= 0.0);
}

TEST_CASE("psf: off-axis centroid lands at -gamma * x0") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  const double gamma = magnification_and_efl(g, zf).gamma;
  PsfOptions opts;
  opts.n = 512;
  for (double x0 : {0.1 * mm, 0.3 * mm, -0.25 * mm}) {
    const auto s = psf(g, {zf, g.lambda0, {x0, 0.0}}, opts);
    CHECK(std::abs(s.centroid.x - (-gamma * x0)) < g.sensor_pitch);
    CHECK(std::abs(s.centroid.y) < g.sensor_pitch);
  }
}

TEST_CASE("psf: translation covariance, off-axis equals shifted on-axis") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  const double gamma = magnification_and_efl(g, zf).gamma;
  PsfOptions opts;
  opts.n = 256;
  const auto on = psf(g, {zf, g.lambda0, {}}, opts);
  const double x0 = 0.2 * mm;
  const auto off = psf(g, {zf, g.lambda0, {x0, 0.0}}, opts);
  const Vec2 shift = correlation_shift(on, off);
  CHECK(std::abs(shift.x - (-gamma * x0)) <= on.pitch);
  CHECK(std::abs(shift.y) <= on.pitch);
}

TEST_CASE("psf: strehl non-increasing over the field (isoplanatic model)") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  PsfOptions opts;
  opts.n = 512;
  opts.recenter = true;
  double prev = 1.1;
  for (int i = 0; i <= 6; ++i) {
    const double theta = deg2rad(3.0 * i / 6);
    const auto s = psf(g, {zf, g.lambda0, {zf * std::tan(theta), 0.0}}, opts);
    CHECK(s.strehl >= 0.13);
    CHECK(s.strehl <= prev + 1e-6);
    prev = s.strehl;
  }
}

TEST_CASE("psf: dual-path agreement between pupil integral and field chain") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);

  auto compare = [&](double distance, double lambda, double x0) {
    PsfOptions chain_opts;
    chain_opts.n = 1536;
    chain_opts.path = PsfPath::kFieldChain;
    const auto chain = psf(g, {distance, lambda, {x0, 0.0}}, chain_opts);

    PsfOptions pupil_opts;
    pupil_opts.n = chain.n;
    pupil_opts.pitch = chain.pitch;
    const auto pupil = psf(g, {distance, lambda, {x0, 0.0}}, pupil_opts);

    // Power-normalized intensity comparison.
    std::vector<double> a = chain.intensity, b = pupil.intensity;
    double sa = 0.0, sb = 0.0;
    for (double v : a) sa += v;
    for (double v : b) sb += v;
    for (double& v : a) v /= sa;
    for (double& v : b) v /= sb;
    return oracles::rel_rms(a, b);
  };

  CHECK(compare(zf, 532 * nm, 0.0) < 1e-3);
  CHECK(compare(zf, 532 * nm, 0.2 * mm) < 1e-3);
  CHECK(compare(zf, 560 * nm, 0.0) < 1e-3);      // mild defocus
  CHECK(compare(0.8 * zf, 532 * nm, 0.0) < 1e-3);  // depth defocus
}

TEST_CASE("mtf: delta PSF has unit MTF everywhere") {
  PsfSample s;
  s.n = 128;
  s.pitch = 2 * um;
  s.intensity.assign(128 * 128, 0.0);
  s.intensity[64 * 128 + 64] = 1.0;
  const auto curve = mtf(s);
  for (double v : curve.mtf) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mtf: diffraction-limited PSF matches the analytic circular MTF") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  PsfOptions opts;
  opts.n = 1024;
  const auto s = psf(g, {zf, g.lambda0, {}}, opts);
  const auto curve = mtf(s);
  const double cutoff =
      g.eyepiece_mask.diameter / (g.lambda0 * g.s_sep);  // first zero
  for (std::size_t i = 0; i < curve.mtf.size(); ++i) {
    const double u = curve.frequency[i] / cutoff;
    if (u > 1.2) break;
    CHECK(std::abs(curve.mtf[i] - oracles::circular_mtf(u)) < 0.02);
  }
  // The implied cutoff agrees with the diffraction bound.
  CHECK(curve.cutoff(0.05) < cutoff * 1.02);
  CHECK(curve.cutoff(0.05) > cutoff * 0.85);
}

TEST_CASE("mtf: production cutoffs are reported at both thresholds") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  PsfOptions opts;
  opts.n = 1024;
  const auto curve = mtf(psf(g, {zf, g.lambda0, {}}, opts));
  const double c_design = curve.cutoff(kDesignMtfThreshold);
  const double c_02 = curve.cutoff(0.2);
  CHECK(c_02 < c_design);
  // Both sit below the hard diffraction bound D/(lambda s).
  const double bound = g.eyepiece_mask.diameter / (g.lambda0 * g.s_sep);
  CHECK(c_design < bound);
  MESSAGE("design cutoff ", c_design * 1e-3, " lp/mm; 0.2 cutoff ",
          c_02 * 1e-3, " lp/mm; diffraction bound ", bound * 1e-3, " lp/mm");
}

TEST_CASE("spot: polynomial aberration dominates the quadratic residual") {
  // The acceptance gate compares against the published table; here the
  // tracer's own structure is pinned down: the optimized polynomial leaves
  // a micron-scale residual where the pure quadratic images perfectly.
  const auto gq = production_geometry();
  const auto gp = production_geometry_polynomial();
  const double rms_quad = spot_trace(gq, 0.0, 4000).rms;
  const double rms_poly = spot_trace(gp, 0.0, 4000).rms;
  CHECK(rms_quad < 0.02 * um);
  CHECK(rms_poly > 1.0 * um);
  MESSAGE("polynomial on-axis spot RMS: ", rms_poly / um, " um");
  // Deterministic ray fill: identical call, identical diagram.
  const auto a = spot_trace(gp, 1.0, 2000);
  const auto b = spot_trace(gp, 1.0, 2000);
  CHECK(a.rms == b.rms);
}

TEST_CASE("spot: paraxial quadratic RMS collapses as the pupil shrinks") {
  auto g = production_geometry();
  std::vector<double> rms;
  for (double stop : {0.8 * mm, 0.4 * mm, 0.2 * mm}) {
    g.eyepiece_mask.diameter = stop;
    rms.push_back(spot_trace(g, 0.0, 2000).rms);
  }
  CHECK(rms[0] < 0.2 * um);  // linear model: already tiny at full pupil
  CHECK(rms[1] <= rms[0] + 1e-12);
  CHECK(rms[2] <= rms[1] + 1e-12);
}

TEST_CASE("spot: input validation") {
  const auto g = production_geometry();
  CHECK_THROWS_AS(spot_trace(g, 0.0, 100), DomainError);
  CHECK_THROWS_AS(spot_trace(g, -1.0, 2000), DomainError);
}

TEST_CASE("wave/geometric consistency in the geometric regime") {
  // Defocus the query strongly: the wave PSF's second-moment radius and
  // the geometric blur-disk RMS must agree within a factor of two once the
  // blur clears five Airy radii.
  const auto g = production_geometry();
  const double airy = 1.22 * g.lambda0 * g.s_sep / g.eyepiece_mask.diameter;
  const double zq = 0.55 * focal_plane(g, g.lambda0);
  PsfOptions opts;
  opts.n = 1024;
  const auto blurred = psf(g, {zq, g.lambda0, {}}, opts);
  // Defocus Delta maps the stop edge to radius |Delta| r_stop s on the
  // sensor; a uniform disk of radius a has radial RMS a/sqrt(2).
  const double delta = residual_defocus(g, zq, g.lambda0);
  const double a =
      std::abs(delta) * 0.5 * g.eyepiece_mask.diameter * g.s_sep;
  REQUIRE(a > 5 * airy);  // geometric regime
  const double rms_wave = blurred.second_moment_radius();
  const double rms_geo = a / std::sqrt(2.0);
  CHECK(rms_wave / rms_geo < 2.0);
  CHECK(rms_geo / rms_wave < 2.0);
}
