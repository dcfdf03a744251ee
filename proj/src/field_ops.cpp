#include "metatele/field_ops.hpp"

#include <cmath>
#include <sstream>

namespace metatele {

ComplexField point_source_field(Vec2 x0, double z0, double wavelength,
                                const GridSpec& grid, bool collimated) {
  ComplexField f(grid.n, grid.pitch, wavelength);
  if (collimated || std::isinf(z0)) {
    const complexd v(1.0 / grid.n, 0.0);
    for (auto& a : f.data()) a = v;
    return f;
  }
  if (z0 == 0.0) throw DomainError("point_source_field: z0 must be nonzero");

  // Nyquist check on the local fringe frequency k*||x0-x||/z0 at the grid
  // edge: ||x0-x||_max / (lambda |z0|) <= 1/(2 pitch).
  const double half = 0.5 * f.extent();
  const double dx = std::max(std::abs(x0.x - half), std::abs(x0.x + half));
  const double dy = std::max(std::abs(x0.y - half), std::abs(x0.y + half));
  const double rmax = std::hypot(dx, dy);
  const double fmax = rmax / (wavelength * std::abs(z0));
  if (fmax > 1.0 / (2.0 * grid.pitch)) {
    const int min_n =
        static_cast<int>(std::ceil(2.0 * fmax * f.extent()));
    std::ostringstream os;
    os << "point_source_field: fringe frequency " << fmax * 1e-3
       << " cycles/mm at the grid edge exceeds Nyquist "
       << 1.0 / (2.0 * grid.pitch) * 1e-3 << " cycles/mm; need N >= " << min_n
       << " at this window";
    throw SamplingError(os.str(), min_n);
  }

  const double k = wavenumber(wavelength);
  for (int r = 0; r < grid.n; ++r) {
    const double y = f.y_of(r);
    for (int c = 0; c < grid.n; ++c) {
      const double x = f.x_of(c);
      const double r2 = (x0.x - x) * (x0.x - x) + (x0.y - y) * (x0.y - y);
      f.at(r, c) = std::exp(complexd(0.0, k / (2.0 * z0) * r2));
    }
  }
  f.normalize_power();
  return f;
}

ComplexField apply_thin_lens(const ComplexField& field, double focal) {
  if (focal == 0.0) throw DomainError("apply_thin_lens: focal must be nonzero");
  if (std::isinf(focal)) return field;
  ComplexField out = field;
  const double k = wavenumber(field.wavelength());
  for (int r = 0; r < out.n(); ++r) {
    const double y = out.y_of(r);
    for (int c = 0; c < out.n(); ++c) {
      const double x = out.x_of(c);
      out.at(r, c) *=
          std::exp(complexd(0.0, -k / (2.0 * focal) * (x * x + y * y)));
    }
  }
  return out;
}

ComplexField apply_phase_profile(const ComplexField& field,
                                 const PhaseProfile& profile,
                                 const ApertureMask& mask,
                                 const EyepiecePerturbation& pert) {
  if (mask.diameter > field.extent())
    throw DomainError("apply_phase_profile: mask exceeds field extent");
  ComplexField out = field;
  const double k0 = wavenumber(profile.lambda0);
  const double cx = std::cos(pert.tilt_x);
  const double cy = std::cos(pert.tilt_y);
  for (int r = 0; r < out.n(); ++r) {
    const double y = out.y_of(r);
    for (int c = 0; c < out.n(); ++c) {
      const double x = out.x_of(c);
      const Vec2 p{x - pert.decenter.x, y - pert.decenter.y};
      const double t = mask.transmittance(p);
      if (t == 0.0) {
        out.at(r, c) = 0.0;
        continue;
      }
      // Tilt: first-order linear phase plus profile evaluated at the
      // projected coordinates. Valid for sub-degree tilts.
      const Vec2 proj{p.x * cx, p.y * cy};
      double phi = eval_phase(profile, proj);
      phi += k0 * (std::sin(pert.tilt_x) * p.x + std::sin(pert.tilt_y) * p.y);
      out.at(r, c) *= t * std::exp(complexd(0.0, phi));
    }
  }
  return out;
}

}  // namespace metatele
