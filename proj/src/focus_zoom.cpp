#include "metatele/focus_zoom.hpp"

#include <cmath>
#include <sstream>

namespace metatele {

namespace {

constexpr double kSMin = 0.05 * mm;
constexpr double kSMax = 2000 * mm;

}  // namespace

double autofocus_solve(const SystemGeometry& geom, double distance) {
  geom.validate();
  if (!(distance > 0.0) || !std::isfinite(distance))
    throw DomainError("autofocus_solve: distance must be positive and finite");

  // Delta(s) = 1/s + A2 - (k0/k0)/f2 is monotone in s, so the root is
  // closed-form; the bracket scan guards the physical range.
  const auto pc = paraxial_coefficients(geom, object_depth(distance));
  const double rest = pc.a2 - 1.0 / geom.eyepiece_focal();
  const double s = -1.0 / rest;
  if (!(s > kSMin) || !(s < kSMax)) {
    std::ostringstream os;
    os << "autofocus_solve: no eyepiece-sensor separation in ["
       << kSMin / mm << ", " << kSMax / mm << "] mm focuses an object at "
       << distance / mm << " mm (closed-form s = " << s / mm << " mm)";
    throw NoRootError(os.str());
  }
  // Verify |Delta| < 1e-9 mm^-1 = 1e-6 m^-1.
  SystemGeometry g = geom;
  g.s_sep = s;
  const double delta = residual_defocus(g, distance, geom.lambda0);
  if (std::abs(delta) > 1e-6)
    throw NoRootError("autofocus_solve: residual defocus above tolerance");
  return s;
}

ZoomSolution zoom_solve(const SystemGeometry& geom, double target_efl,
                        double reference_distance) {
  geom.validate();
  if (target_efl < 20 * mm - 1e-12 || target_efl > 50 * mm + 1e-12) {
    std::ostringstream os;
    os << "zoom_solve: target EFL " << target_efl / mm
       << " mm outside the supported range [20, 50] mm";
    throw DomainError(os.str());
  }

  // EFL(m) = s(m) f1 / (f1 - m) with s(m) the autofocus solution at the
  // reference distance. Bisect on m over the focusable branch.
  auto efl_of = [&](double m_sep) -> double {
    SystemGeometry g = geom;
    g.m_sep = m_sep;
    const double s = autofocus_solve(g, reference_distance);
    return s * g.f1 / (g.f1 - m_sep);
  };

  // The focusable interval of m: the intermediate conjugate must sit within
  // |f2| behind the eyepiece. Scan for a sign-change bracket.
  const double f1 = geom.f1;
  double lo = 0.2 * f1, hi = 0.999 * f1;
  const int kScan = 400;
  double prev_m = NAN, prev_v = NAN;
  double bm0 = NAN, bm1 = NAN;
  for (int i = 0; i <= kScan; ++i) {
    const double m_sep = lo + (hi - lo) * i / kScan;
    double v;
    try {
      v = efl_of(m_sep) - target_efl;
    } catch (const Error&) {
      prev_m = NAN;
      continue;
    }
    if (!std::isnan(prev_m) && ((prev_v < 0) != (v < 0))) {
      bm0 = prev_m;
      bm1 = m_sep;
      break;
    }
    prev_m = m_sep;
    prev_v = v;
  }
  if (std::isnan(bm0)) {
    std::ostringstream os;
    os << "zoom_solve: no separation bracket for EFL = " << target_efl / mm
       << " mm over m in [" << lo / mm << ", " << hi / mm << "] mm";
    throw NoRootError(os.str());
  }
  double v0 = efl_of(bm0) - target_efl;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (bm0 + bm1);
    const double v = efl_of(mid) - target_efl;
    if ((v < 0) == (v0 < 0)) {
      bm0 = mid;
      v0 = v;
    } else {
      bm1 = mid;
    }
    if (std::abs(bm1 - bm0) < 1e-13) break;
  }

  ZoomSolution sol;
  sol.m_sep = 0.5 * (bm0 + bm1);
  sol.geometry = geom;
  sol.geometry.m_sep = sol.m_sep;
  sol.s_sep = autofocus_solve(sol.geometry, reference_distance);
  sol.geometry.s_sep = sol.s_sep;
  return sol;
}

HyperfocalResult hyperfocal(double epd, double efl, double lambda,
                            double pixel_pitch) {
  if (!(epd > 0) || !(efl > 0) || !(lambda > 0) || !(pixel_pitch > 0))
    throw DomainError("hyperfocal: all inputs must be positive");
  HyperfocalResult h;
  h.f_number = efl / epd;
  h.airy_diameter = 2.44 * lambda * h.f_number;
  h.pixel_limited = pixel_pitch > h.airy_diameter;
  h.circle_of_confusion = std::max(h.airy_diameter, pixel_pitch);
  h.hyperfocal = efl * efl / (h.f_number * h.circle_of_confusion);
  h.near_limit = 0.5 * h.hyperfocal;
  return h;
}

}  // namespace metatele
