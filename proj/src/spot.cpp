#include "metatele/spot.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace metatele {

SpotDiagram spot_trace(const SystemGeometry& geom, double field_angle_deg,
                       int n_rays) {
  geom.validate();
  if (n_rays < 1000)
    throw DomainError("spot_trace: need at least 1000 rays");
  if (field_angle_deg < 0.0)
    throw DomainError("spot_trace: field angle must be >= 0");

  const double w = focal_plane(geom, geom.lambda0);
  if (!(w > 0.0) || !std::isfinite(w)) {
    std::ostringstream os;
    os << "spot_trace: no finite positive focal plane (z_f = " << w / mm
       << " mm)";
    throw NoRootError(os.str());
  }
  const double x_v = w * std::tan(deg2rad(field_angle_deg));
  const double m = geom.m_sep;
  const double r_stop = 0.5 * geom.eyepiece_mask.diameter;

  // Stop positions map linearly back to objective heights for the focused
  // bundle: q = T h + m x_v / w with T = 1 - m (1/w + 1/f1).
  const double t_factor = 1.0 - m * (1.0 / w + 1.0 / geom.f1);
  if (std::abs(t_factor) < 1e-9)
    throw DegenerateConjugateError("spot_trace: stop images onto objective");

  SpotDiagram spot;
  spot.points.reserve(n_rays);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  double sx = 0.0, sy = 0.0;
  for (int i = 0; i < n_rays; ++i) {
    const double rr = r_stop * std::sqrt((i + 0.5) / n_rays);
    const double th = golden * i;
    const Vec2 q{rr * std::cos(th), rr * std::sin(th)};
    if (q.norm() > r_stop + 1e-15)
      throw Error("spot_trace: ray miss at the eyepiece mask");

    // Objective heights and the incoming slopes of the bundle aimed at the
    // focal-plane point.
    const Vec2 h{(q.x - m * x_v / w) / t_factor, q.y / t_factor};
    Vec2 u{(x_v - h.x) / w, (0.0 - h.y) / w};
    // Thin-lens deflection.
    u = u - (1.0 / geom.f1) * h;
    // Local grating deflection at the eyepiece.
    const double rq = q.norm();
    if (rq > 0.0) {
      const double dslope =
          geom.lambda0 / (2.0 * kPi) * eval_phase_slope(geom.profile, rq);
      u = u + (dslope / rq) * q;
    }
    // Sensor leg; sensor coordinates are parity-flipped.
    const Vec2 land = q + geom.s_sep * u;
    const Vec2 p{-land.x, -land.y};
    spot.points.push_back(p);
    sx += p.x;
    sy += p.y;
  }
  spot.centroid = {sx / n_rays, sy / n_rays};
  double acc = 0.0;
  for (const auto& p : spot.points) acc += (p - spot.centroid).norm2();
  spot.rms = std::sqrt(acc / n_rays);
  return spot;
}

void SpotDiagram::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("SpotDiagram: cannot write " + path);
  out << "x_um,y_um\n";
  out.precision(10);
  for (const auto& p : points) out << p.x / um << "," << p.y / um << "\n";
}

}  // namespace metatele
