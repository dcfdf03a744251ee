#include "metatele/phase_profile.hpp"

#include <cmath>
#include <cstring>

namespace metatele {

namespace {

// Signed sag of a spherical surface with paraxial curvature 1/R:
// s(r) = r^2 / (R (1 + sqrt(1 - r^2/R^2))).
double sphere_sag(double r, double R) {
  const double u = r / R;
  const double arg = 1.0 - u * u;
  if (arg <= 0.0) throw DomainError("lens sag: radius exceeds surface radius");
  return r * r / (R * (1.0 + std::sqrt(arg)));
}

// 16-point Gauss-Legendre nodes/weights on [0, 1]; exact for the r-weighted
// disk moments of polynomials up to r^31.
constexpr int kGl = 16;
constexpr double kGlX[kGl] = {
    0.0052995325041750, 0.0277124884633837, 0.0671843988060841,
    0.1222977958224985, 0.1910618777986781, 0.2709916111713863,
    0.3591982246103705, 0.4524937450811813, 0.5475062549188188,
    0.6408017753896295, 0.7290083888286137, 0.8089381222013219,
    0.8777022041775015, 0.9328156011939159, 0.9722875115366163,
    0.9947004674958250};
constexpr double kGlW[kGl] = {
    0.0135762297058770, 0.0311267619693239, 0.0475792558412464,
    0.0623144856277669, 0.0747979944082884, 0.0845782596975013,
    0.0913017075224618, 0.0947253052275343, 0.0947253052275343,
    0.0913017075224618, 0.0845782596975013, 0.0747979944082884,
    0.0623144856277669, 0.0475792558412464, 0.0311267619693239,
    0.0135762297058770};

std::uint64_t fnv1a(const void* buf, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(buf);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

PhaseProfile PhaseProfile::polynomial(const std::array<double, 7>& c_mm,
                                      double lambda0) {
  PhaseProfile p;
  p.kind = ProfileKind::kPolynomial;
  p.coeffs = c_mm;
  p.lambda0 = lambda0;
  return p;
}

PhaseProfile PhaseProfile::quadratic(double f, double lambda0) {
  PhaseProfile p;
  p.kind = ProfileKind::kQuadratic;
  p.focal = f;
  p.lambda0 = lambda0;
  return p;
}

PhaseProfile PhaseProfile::hyperbolic(double f, double lambda0) {
  PhaseProfile p;
  p.kind = ProfileKind::kHyperbolic;
  p.focal = f;
  p.lambda0 = lambda0;
  return p;
}

PhaseProfile PhaseProfile::spherical(double f, double lambda0) {
  PhaseProfile p;
  p.kind = ProfileKind::kSpherical;
  p.focal = f;
  p.lambda0 = lambda0;
  return p;
}

PhaseProfile PhaseProfile::lens_surface(double f, double n_index,
                                        double lambda0) {
  PhaseProfile p;
  p.kind = ProfileKind::kLensSurface;
  p.focal = f;
  p.lens_index = n_index;
  p.lambda0 = lambda0;
  return p;
}

bool PhaseProfile::is_zero() const {
  if (kind == ProfileKind::kPolynomial) {
    for (double c : coeffs)
      if (c != 0.0) return false;
    return true;
  }
  return false;
}

std::string PhaseProfile::kind_name() const {
  switch (kind) {
    case ProfileKind::kPolynomial: return "polynomial";
    case ProfileKind::kQuadratic: return "quadratic";
    case ProfileKind::kHyperbolic: return "hyperbolic";
    case ProfileKind::kSpherical: return "spherical";
    case ProfileKind::kLensSurface: return "lens-surface";
  }
  return "?";
}

std::uint64_t PhaseProfile::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  int k = static_cast<int>(kind);
  h = fnv1a(&k, sizeof k, h);
  h = fnv1a(&lambda0, sizeof lambda0, h);
  h = fnv1a(&focal, sizeof focal, h);
  h = fnv1a(coeffs.data(), sizeof(double) * coeffs.size(), h);
  h = fnv1a(&lens_index, sizeof lens_index, h);
  return h;
}

double eval_phase_radial(const PhaseProfile& p, double r) {
  const double k0 = wavenumber(p.lambda0);
  switch (p.kind) {
    case ProfileKind::kPolynomial: {
      // Coefficients are mm-based: evaluate with r in mm, phase via
      // (2pi/lambda0[mm]) so the result is in radians.
      const double r_mm = r / mm;
      const double r2 = r_mm * r_mm;
      double acc = 0.0;
      double rp = r2;
      for (int i = 0; i < 7; ++i) {
        acc += p.coeffs[i] * rp;
        rp *= r2;
      }
      return 2.0 * kPi / (p.lambda0 / mm) * acc;
    }
    case ProfileKind::kQuadratic:
      return -k0 * r * r / (2.0 * p.focal);
    case ProfileKind::kHyperbolic: {
      // Power-matched generalization of the hyperbolic metalens profile:
      // -sign(f) (2pi/lambda0) (sqrt(r^2 + f^2) - |f|); reduces to the
      // usual (2pi/lambda0)(f - sqrt(r^2+f^2)) for f > 0.
      const double s = p.focal >= 0 ? 1.0 : -1.0;
      const double af = std::abs(p.focal);
      return -s * k0 * (std::sqrt(r * r + p.focal * p.focal) - af);
    }
    case ProfileKind::kSpherical: {
      const double s = p.focal >= 0 ? 1.0 : -1.0;
      const double af = std::abs(p.focal);
      const double arg = p.focal * p.focal - r * r;
      if (arg < 0.0)
        throw DomainError("spherical profile: radius exceeds |f|");
      return -s * k0 * (af - std::sqrt(arg));
    }
    case ProfileKind::kLensSurface: {
      // Symmetric thin lens, two spherical surfaces of radius R = 2(n-1)f.
      // Exact sag keeps the true spherical aberration of a refractive
      // element, which is what distinguishes it from the flat metasurface
      // under decenter.
      const double R = 2.0 * (p.lens_index - 1.0) * p.focal;
      const double sag2 = 2.0 * sphere_sag(r, R);
      return -k0 * (p.lens_index - 1.0) * sag2;
    }
  }
  return 0.0;
}

double eval_phase(const PhaseProfile& p, Vec2 x) {
  return eval_phase_radial(p, x.norm());
}

double eval_phase_slope(const PhaseProfile& p, double r) {
  const double k0 = wavenumber(p.lambda0);
  switch (p.kind) {
    case ProfileKind::kPolynomial: {
      const double r_mm = r / mm;
      const double r2 = r_mm * r_mm;
      double acc = 0.0;
      double rp = r_mm;
      for (int i = 0; i < 7; ++i) {
        acc += 2.0 * (i + 1) * p.coeffs[i] * rp;
        rp *= r2;
      }
      // d(phi)/dr_mm converted to per-meter.
      return 2.0 * kPi / (p.lambda0 / mm) * acc / mm;
    }
    case ProfileKind::kQuadratic:
      return -k0 * r / p.focal;
    case ProfileKind::kHyperbolic: {
      const double s = p.focal >= 0 ? 1.0 : -1.0;
      return -s * k0 * r / std::sqrt(r * r + p.focal * p.focal);
    }
    case ProfileKind::kSpherical: {
      const double s = p.focal >= 0 ? 1.0 : -1.0;
      const double arg = p.focal * p.focal - r * r;
      if (arg <= 0.0)
        throw DomainError("spherical profile: radius exceeds |f|");
      return -s * k0 * r / std::sqrt(arg);
    }
    case ProfileKind::kLensSurface: {
      const double R = 2.0 * (p.lens_index - 1.0) * p.focal;
      const double arg = 1.0 - (r / R) * (r / R);
      if (arg <= 0.0) throw DomainError("lens sag: radius exceeds surface");
      // d/dr of 2*sag = 2 r / (R sqrt(1 - r^2/R^2)).
      return -k0 * (p.lens_index - 1.0) * 2.0 * r / (R * std::sqrt(arg));
    }
  }
  return 0.0;
}

QuadraticFit fit_quadratic(const PhaseProfile& p, double aperture) {
  const double R = 0.5 * aperture;
  // Minimize int_0^R (phi(r) - a r^2 - b)^2 r dr over (a, b). The piston b
  // is free because a lens phase is only defined up to a constant; with it
  // the fitted power is the focus-balanced one.
  // Area-weighted moments: <f> = (2/R^2) int f r dr.
  double m_phi = 0.0, m_phi_r2 = 0.0;
  for (int i = 0; i < kGl; ++i) {
    const double r = kGlX[i] * R;
    const double phi = eval_phase_radial(p, r);
    m_phi += kGlW[i] * phi * r;
    m_phi_r2 += kGlW[i] * phi * r * r * r;
  }
  m_phi *= 2.0 / R;        // <phi>
  m_phi_r2 *= 2.0 / R;     // <phi r^2>
  const double m_r2 = R * R / 2.0;   // <r^2>
  const double m_r4 = R * R * R * R / 3.0;  // <r^4>
  const double a = (m_phi_r2 - m_phi * m_r2) / (m_r4 - m_r2 * m_r2);
  const double b = m_phi - a * m_r2;

  QuadraticFit fit;
  const double k0 = wavenumber(p.lambda0);
  fit.focal = -k0 / (2.0 * a);

  double ss = 0.0;
  for (int i = 0; i < kGl; ++i) {
    const double r = kGlX[i] * R;
    const double res = eval_phase_radial(p, r) - a * r * r - b;
    ss += kGlW[i] * res * res * r;
  }
  ss *= R;
  // Area-weighted mean square: (2/R^2) * int res^2 r dr.
  fit.rms_residual = std::sqrt(2.0 / (R * R) * ss);
  return fit;
}

double effective_focal_length(const PhaseProfile& p, double aperture) {
  // The chromatic-defocus formulas are exact for a quadratic profile only;
  // every other kind contributes through its focus-balanced quadratic fit.
  if (p.kind == ProfileKind::kQuadratic) return p.focal;
  return fit_quadratic(p, aperture).focal;
}

}  // namespace metatele
