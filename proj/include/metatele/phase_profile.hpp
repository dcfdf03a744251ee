#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "metatele/common.hpp"

namespace metatele {

enum class ProfileKind {
  kPolynomial,   // phi = (2pi/lambda0) * sum_i c_i r^{2i}, i = 1..7
  kQuadratic,    // phi = -(2pi/lambda0) * r^2 / (2 f)
  kHyperbolic,   // power-matched hyperbolic, paraxial focal length f
  kSpherical,    // power-matched spherical cap, paraxial focal length f
  kLensSurface,  // thin biconcave/biconvex refractive lens, exact sag
};

// Radially symmetric eyepiece phase at the design wavelength. Polynomial
// coefficients are stored with radius in millimeters (the native unit of
// the design tables: c1 = 0.25 mm^-1 corresponds to f = -2 mm); evaluation
// converts from SI internally.
struct PhaseProfile {
  ProfileKind kind = ProfileKind::kQuadratic;
  double lambda0 = 532 * nm;
  double focal = -2 * mm;              // all kinds except polynomial
  std::array<double, 7> coeffs{};      // polynomial, mm-based units
  double lens_index = 1.5;             // kLensSurface refraction index

  static PhaseProfile polynomial(const std::array<double, 7>& c_mm,
                                 double lambda0 = 532 * nm);
  static PhaseProfile quadratic(double f, double lambda0 = 532 * nm);
  static PhaseProfile hyperbolic(double f, double lambda0 = 532 * nm);
  static PhaseProfile spherical(double f, double lambda0 = 532 * nm);
  static PhaseProfile lens_surface(double f, double n_index,
                                   double lambda0 = 532 * nm);

  bool is_zero() const;
  std::string kind_name() const;
  std::uint64_t hash() const;
};

// Exact closed-form phase in radians at radius ||x||, unwrapped.
double eval_phase(const PhaseProfile& profile, Vec2 x);
double eval_phase_radial(const PhaseProfile& profile, double r);

// d(phi)/dr at radius r — drives the geometric ray deflection.
double eval_phase_slope(const PhaseProfile& profile, double r);

struct QuadraticFit {
  double focal = 0.0;         // best-fit quadratic focal length
  double rms_residual = 0.0;  // rad, over the disk
};

// Area-weighted least-squares fit of the profile against -k0 r^2/(2f)
// over a disk of the given aperture diameter.
QuadraticFit fit_quadratic(const PhaseProfile& profile, double aperture);

// Focal length driving the chromatic defocus term: the profile's own f for
// quadratic-power kinds, the fitted quadratic focal length for polynomials.
double effective_focal_length(const PhaseProfile& profile, double aperture);

}  // namespace metatele
