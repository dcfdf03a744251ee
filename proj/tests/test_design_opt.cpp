#include <cmath>

#include "doctest.h"
#include "metatele/config.hpp"
#include "metatele/design.hpp"
#include "metatele/focus_zoom.hpp"
#include "metatele/psf.hpp"
#include "metatele/tolerance.hpp"
#include "oracles.hpp"

using namespace metatele;

TEST_CASE("hyperfocal: prototype golden numbers") {
  const auto h = hyperfocal(5 * mm, 30 * mm, 532 * nm, 2 * um);
  CHECK(h.f_number == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(h.airy_diameter == doctest::Approx(7.79 * um).epsilon(0.007));
  CHECK_FALSE(h.pixel_limited);
  CHECK(h.hyperfocal == doctest::Approx(19.2).epsilon(0.02));
  CHECK(h.near_limit == doctest::Approx(9.6).epsilon(0.02));
}

TEST_CASE("hyperfocal: pixel-limited branch") {
  // A coarse sensor dominates the circle of confusion.
  const double pitch = 20 * um;
  const auto h = hyperfocal(5 * mm, 30 * mm, 532 * nm, pitch);
  CHECK(h.pixel_limited);
  CHECK(h.circle_of_confusion == doctest::Approx(pitch));
  CHECK(h.hyperfocal ==
        doctest::Approx(30e-3 * 30e-3 / (6.0 * pitch)).epsilon(1e-12));
}

TEST_CASE("hyperfocal: wavelength proportionality") {
  const auto a = hyperfocal(5 * mm, 30 * mm, 350e-9 * 2, 0.1 * um);
  const auto b = hyperfocal(5 * mm, 30 * mm, 350e-9, 0.1 * um);
  CHECK(a.airy_diameter == doctest::Approx(2.0 * b.airy_diameter));
  CHECK(a.hyperfocal == doctest::Approx(0.5 * b.hyperfocal));
  CHECK_THROWS_AS(hyperfocal(0.0, 30 * mm, 532 * nm, 2 * um), DomainError);
}

TEST_CASE("autofocus: focal plane is the fixed point of the nominal s") {
  const auto g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  CHECK(autofocus_solve(g, zf) == doctest::Approx(g.s_sep).epsilon(1e-9));
}

TEST_CASE("autofocus: solutions track a decade of object distances") {
  const auto g = production_geometry();
  PsfOptions opts;
  opts.n = 512;
  const double nominal = [&] {
    const double zf = focal_plane(g, g.lambda0);
    return psf(g, {zf, g.lambda0, {}}, opts).strehl;
  }();
  for (double z : {200 * mm, 365 * mm, 673 * mm, 1200 * mm, 2000 * mm}) {
    SystemGeometry fg = g;
    fg.s_sep = autofocus_solve(g, z);
    CHECK(std::abs(residual_defocus(fg, z, g.lambda0)) < 1e-6);
    const auto s = psf(fg, {z, g.lambda0, {}}, opts);
    CHECK(std::abs(s.strehl - nominal) <= 0.05 * nominal);
  }
}

TEST_CASE("autofocus: the dataset distance has a valid solution") {
  const auto g = production_geometry();
  const double s = autofocus_solve(g, 673 * mm);
  CHECK(s > 0);
  CHECK(s == doctest::Approx(19.8986 * mm).epsilon(1e-4));
}

TEST_CASE("autofocus: impossible conjugates report the scanned interval") {
  auto g = production_geometry();
  g.m_sep = 8.64 * mm;  // intermediate image lands in front of the eyepiece
  g.s_sep = 4.56 * mm;
  try {
    autofocus_solve(g, 673 * mm);
    FAIL("expected NoRootError");
  } catch (const NoRootError& e) {
    CHECK(std::string(e.what()).find("mm") != std::string::npos);
  }
}

TEST_CASE("zoom: target 30 mm round-trips through its own EFL") {
  const auto g = production_geometry();
  const auto sol = zoom_solve(g, 30 * mm);
  const auto sc = magnification_and_efl(sol.geometry, 673 * mm);
  CHECK(sc.efl == doctest::Approx(30 * mm).epsilon(1e-9));
  CHECK(std::abs(residual_defocus(sol.geometry, 673 * mm, g.lambda0)) < 1e-6);
  // Solving again for the achieved EFL reproduces the same separations.
  const auto again = zoom_solve(g, sc.efl);
  CHECK(again.m_sep == doctest::Approx(sol.m_sep).epsilon(1e-9));
  CHECK(again.s_sep == doctest::Approx(sol.s_sep).epsilon(1e-9));
}

TEST_CASE("zoom: the full 20-50 mm range stays focused and sharp") {
  const auto g = production_geometry();
  ToleranceOptions topts;
  topts.n = 512;
  for (double efl : {20 * mm, 30 * mm, 40 * mm, 50 * mm}) {
    const auto sol = zoom_solve(g, efl);
    const auto sc = magnification_and_efl(sol.geometry, 673 * mm);
    CHECK(sc.efl == doctest::Approx(efl).epsilon(1e-9));
    const double ms = mean_strehl_over_field(sol.geometry, {}, topts, 2,
                                             673 * mm);
    CHECK(ms >= 0.13);
  }
  CHECK_THROWS_AS(zoom_solve(g, 55 * mm), DomainError);
  CHECK_THROWS_AS(zoom_solve(g, 15 * mm), DomainError);
}

TEST_CASE("zoom: EFL is monotone in the separation below f1") {
  const auto g = production_geometry();
  double prev = 0.0;
  for (double m_sep : {4.0 * mm, 5.0 * mm, 6.0 * mm, 7.0 * mm}) {
    SystemGeometry gg = g;
    gg.m_sep = m_sep;
    const double efl = gg.s_sep * gg.f1 / (gg.f1 - m_sep);
    CHECK(efl > prev);
    prev = efl;
  }
}

TEST_CASE("tolerance: zero perturbation reproduces the unperturbed value") {
  const auto g = production_geometry();
  PerturbationSpec spec;
  spec.element = PerturbElement::kEyepiece;
  spec.dof = PerturbDof::kLateralX;
  spec.magnitude_max = 0.04 * mm;
  spec.sample_count = 3;
  ToleranceOptions topts;
  topts.n = 256;
  topts.field_points = 3;
  const auto curve = tolerance_sweep(g, spec, topts, 2);
  const double unperturbed = mean_strehl_over_field(g, {}, topts, 2);
  CHECK(curve.magnitude[0] == 0.0);
  CHECK(curve.mean_strehl[0] == doctest::Approx(unperturbed).epsilon(1e-12));
}

TEST_CASE("tolerance: lateral decenter curve is monotone non-increasing") {
  const auto g = production_geometry();
  PerturbationSpec spec;
  spec.dof = PerturbDof::kLateralX;
  spec.magnitude_max = 0.04 * mm;
  spec.sample_count = 5;
  ToleranceOptions topts;
  topts.n = 512;
  topts.field_points = 3;
  const auto curve = tolerance_sweep(g, spec, topts, 2);
  for (std::size_t i = 1; i < curve.mean_strehl.size(); ++i)
    CHECK(curve.mean_strehl[i] <= curve.mean_strehl[i - 1] + 1e-6);
}

TEST_CASE("tolerance: strehl is even in the decenter sign") {
  const auto g = production_geometry();
  ToleranceOptions topts;
  topts.n = 256;
  topts.field_points = 3;
  for (double d : {0.01 * mm, 0.02 * mm, 0.04 * mm}) {
    EyepiecePerturbation plus, minus;
    plus.decenter = {d, 0.0};
    minus.decenter = {-d, 0.0};
    const double sp = mean_strehl_over_field(g, plus, topts, 2);
    const double sm = mean_strehl_over_field(g, minus, topts, 2);
    CHECK(std::abs(sp - sm) < 1e-6);
  }
}

TEST_CASE("tolerance: hybrid drops no more than the refractive eyepiece") {
  const auto hybrid = production_geometry();
  auto refractive = production_geometry();
  refractive.profile =
      PhaseProfile::lens_surface(-2 * mm, 1.5, refractive.lambda0);
  ToleranceOptions topts;
  topts.n = 512;
  topts.field_points = 3;
  EyepiecePerturbation pert;
  pert.decenter = {0.02 * mm, 0.0};
  const double h0 = mean_strehl_over_field(hybrid, {}, topts, 2);
  const double h1 = mean_strehl_over_field(hybrid, pert, topts, 2);
  const double r0 = mean_strehl_over_field(refractive, {}, topts, 2);
  const double r1 = mean_strehl_over_field(refractive, pert, topts, 2);
  MESSAGE("hybrid ", h0, " -> ", h1, "; refractive ", r0, " -> ", r1);
  CHECK(h0 - h1 <= (r0 - r1) + 1e-9);
}

TEST_CASE("tolerance: perturbations outside validity are rejected") {
  PerturbationSpec spec;
  spec.dof = PerturbDof::kLateralX;
  spec.magnitude_max = 0.2 * mm;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec.dof = PerturbDof::kTiltX;
  spec.magnitude_max = deg2rad(2.0);
  CHECK_THROWS_AS(spec.validate(), DomainError);
  spec.magnitude_max = deg2rad(0.5);
  spec.sample_count = 1;
  CHECK_THROWS_AS(spec.validate(), DomainError);
}

TEST_CASE("optimize_design: production start converges within constraints") {
  const auto init = production_geometry();
  DesignConstraints con;  // C = 0.13, f_N = 250 lp/mm, 3 deg, 13.2 mm
  DesignOptions opts;
  opts.max_iterations_per_stage = 250;
  opts.verify_n = 512;
  opts.workers = 2;
  const auto result = optimize_design(init, con, opts);
  CHECK(result.report.feasible);
  CHECK(result.report.final_ratio <= 0.45);
  for (const auto& am : result.report.strehl_margins) CHECK(am.margin >= 0.0);
  CHECK(result.report.cutoff_margin >= 0.0);
  CHECK(result.report.track_margin >= 0.0);
  MESSAGE("converged ratio ", result.report.final_ratio, ", cutoff ",
          result.report.cutoff * 1e-3, " lp/mm, m = ",
          result.geometry.m_sep / mm, " mm, s = ", result.geometry.s_sep / mm,
          " mm");

  // Constraint satisfaction re-derived from scratch, not from the report.
  const auto re = verify_design(result.geometry, con, opts);
  CHECK(re.feasible);
}

TEST_CASE("optimize_design: relaxed constraints descend monotonically") {
  const auto init = production_geometry();
  DesignConstraints con;
  con.strehl_floor = 1e-6;
  con.cutoff_floor = 1e-3;
  con.track_budget = 1000 * mm;  // fully relaxed problem
  DesignOptions opts;
  opts.max_iterations_per_stage = 60;
  opts.penalty_stages = 1;
  opts.verify_n = 256;
  const auto result = optimize_design(init, con, opts);
  const auto& trace = result.report.ratio_trace;
  REQUIRE(trace.size() > 10);
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i] <= trace[i - 1] + 1e-12);
  CHECK(trace.back() < trace.front());
}

TEST_CASE("optimize_design: never worse than a feasible start") {
  // A feasible initial point: short back focus so the verified cutoff at
  // the design threshold clears 250 lp/mm (needs s below ~4.85 mm).
  auto init = production_geometry();
  init.m_sep = 5.60 * mm;
  init.s_sep = 4.80 * mm;
  DesignConstraints con;
  DesignOptions opts;
  opts.max_iterations_per_stage = 150;
  opts.verify_n = 512;
  const auto init_report = verify_design(init, con, opts);
  REQUIRE(init_report.feasible);
  const double init_ratio =
      magnification_and_efl(init, focal_plane(init, init.lambda0))
          .telephoto_ratio;
  const auto result = optimize_design(init, con, opts);
  CHECK(result.report.feasible);
  CHECK(result.report.final_ratio <= init_ratio + 1e-9);
}

TEST_CASE("optimize_design: infeasible start is rejected up front") {
  auto init = production_geometry();
  init.m_sep = init.f1;  // afocal: EFL undefined
  DesignConstraints con;
  CHECK_THROWS_AS(optimize_design(init, con, {}), DomainError);
}

TEST_CASE("converged polynomial and its quadratic fit match in MTF") {
  // The optimized polynomial against its fitted quadratic: on-axis MTF
  // curves differ by < 5% RMS.
  const auto gp = production_geometry_polynomial();
  auto gq = production_geometry();
  gq.profile = PhaseProfile::quadratic(
      fit_quadratic(gp.profile, gp.eyepiece_mask.diameter).focal, gq.lambda0);
  PsfOptions opts;
  opts.n = 1024;
  const auto mp = mtf(psf(gp, {focal_plane(gp, gp.lambda0), gp.lambda0, {}},
                          opts));
  const auto mq = mtf(psf(gq, {focal_plane(gq, gq.lambda0), gq.lambda0, {}},
                          opts));
  REQUIRE(mp.mtf.size() == mq.mtf.size());
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < mp.mtf.size(); ++i) {
    acc += (mp.mtf[i] - mq.mtf[i]) * (mp.mtf[i] - mq.mtf[i]);
    ++count;
  }
  const double rms = std::sqrt(acc / count);
  CHECK(rms < 0.05);
  MESSAGE("polynomial vs quadratic MTF RMS difference: ", rms);
}
