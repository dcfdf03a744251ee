#include "metatele/system_geometry.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace metatele {

void SystemGeometry::validate() const {
  if (!(f1 > 0.0)) throw DomainError("SystemGeometry: f1 must be > 0");
  if (!(m_sep > 0.0)) throw DomainError("SystemGeometry: m_sep must be > 0");
  if (!(s_sep > 0.0)) throw DomainError("SystemGeometry: s_sep must be > 0");
  if (eyepiece_mask.diameter > objective_aperture)
    throw DomainError(
        "SystemGeometry: eyepiece mask exceeds the objective aperture");
  if (lens_model) {
    const double f = lens_model->surface_radius / (lens_model->n_index - 1.0);
    if (std::abs(f - f1) > 1e-9 * std::abs(f1)) {
      std::ostringstream os;
      os << "SystemGeometry: lens_model implies f1 = R/(n-1) = " << f / mm
         << " mm but f1 = " << f1 / mm << " mm";
      throw DomainError(os.str());
    }
  }
}

double SystemGeometry::eyepiece_focal() const {
  return effective_focal_length(profile, eyepiece_mask.diameter);
}

std::uint64_t SystemGeometry::hash() const {
  auto mix = [](std::uint64_t h, const void* buf, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(buf);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
    return h;
  };
  std::uint64_t h = 1469598103934665603ULL;
  h = mix(h, &f1, sizeof f1);
  h = mix(h, &objective_aperture, sizeof objective_aperture);
  h = mix(h, &m_sep, sizeof m_sep);
  h = mix(h, &s_sep, sizeof s_sep);
  h = mix(h, &lambda0, sizeof lambda0);
  h = mix(h, &eyepiece_mask.diameter, sizeof eyepiece_mask.diameter);
  h = mix(h, &sensor_pitch, sizeof sensor_pitch);
  std::uint64_t ph = profile.hash();
  h = mix(h, &ph, sizeof ph);
  return h;
}

ParaxialCoefficients paraxial_coefficients(const SystemGeometry& geom,
                                           double z0_signed) {
  const double m = geom.m_sep;
  const double inv_z0 = std::isinf(z0_signed) ? 0.0 : 1.0 / z0_signed;
  if (!std::isinf(z0_signed) && z0_signed == 0.0)
    throw DomainError("paraxial_coefficients: z0 must be nonzero");

  const double denom = 1.0 / m + inv_z0 - 1.0 / geom.f1;
  if (std::abs(denom) < 1e-9 / m) {
    std::ostringstream os;
    os << "paraxial_coefficients: degenerate conjugate, 1/m + 1/z0 - 1/f1 = "
       << denom << " 1/m at z0 = " << z0_signed / mm << " mm";
    throw DegenerateConjugateError(os.str());
  }

  ParaxialCoefficients pc;
  pc.a2 = 1.0 / m - 1.0 / (m * m) / denom;
  pc.b2 = inv_z0 / m / denom;
  return pc;
}

double residual_defocus(const SystemGeometry& geom, double distance,
                        double lambda) {
  const auto pc = paraxial_coefficients(geom, object_depth(distance));
  const double k0_over_k = lambda / geom.lambda0;
  return 1.0 / geom.s_sep + pc.a2 - k0_over_k / geom.eyepiece_focal();
}

double focal_plane(const SystemGeometry& geom, double lambda) {
  const double m = geom.m_sep;
  const double k0_over_k = lambda / geom.lambda0;
  const double R =
      1.0 / geom.s_sep + 1.0 / m - k0_over_k / geom.eyepiece_focal();
  if (std::abs(R) < 1e-12 / m) {
    std::ostringstream os;
    os << "focal_plane: afocal configuration at lambda = " << lambda / nm
       << " nm (R = " << R << ")";
    throw AfocalError(os.str());
  }
  const double inv_zf = 1.0 / (m * m * R) - 1.0 / m + 1.0 / geom.f1;
  if (inv_zf == 0.0) return INFINITY;
  const double zf_signed = 1.0 / inv_zf;
  // Map from the signed formula coordinate back to a distance in front.
  return -zf_signed;
}

SystemScales magnification_and_efl(const SystemGeometry& geom,
                                   double distance) {
  if (std::abs(geom.f1 - geom.m_sep) < 1e-12) {
    throw AfocalError("magnification_and_efl: f1 == m_sep (afocal)");
  }
  const auto pc = paraxial_coefficients(geom, object_depth(distance));
  SystemScales s;
  s.gamma = -geom.s_sep * pc.b2;
  s.efl = geom.s_sep * geom.f1 / (geom.f1 - geom.m_sep);
  s.telephoto_ratio = geom.ttl() / s.efl;
  return s;
}

}  // namespace metatele
