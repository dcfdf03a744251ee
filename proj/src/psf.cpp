#include "metatele/psf.hpp"

#include <cmath>
#include <sstream>

#include "metatele/fft.hpp"
#include "metatele/fresnel.hpp"
#include "metatele/parallel.hpp"

namespace metatele {

namespace {

// Centered DFT: F[j] = sum_k f[k] exp(-2pi i (j-N/2).(k-N/2)/N) per axis.
// The per-axis e^{-i pi N/2} constants square away in 2-D.
void centered_dft2(std::vector<complexd>& data, int n) {
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if ((r + c) & 1) data[static_cast<std::size_t>(r) * n + c] *= -1.0;
  fft2(data, n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if ((r + c) & 1) data[static_cast<std::size_t>(r) * n + c] *= -1.0;
}

// In-place spatial flip p -> -p on a centered even grid.
void flip2(std::vector<complexd>& data, int n) {
  auto index = [n](int r, int c) {
    return static_cast<std::size_t>(r) * n + c;
  };
  std::vector<complexd> out(data.size());
  for (int r = 0; r < n; ++r) {
    const int rf = (n - r) % n;
    for (int c = 0; c < n; ++c) {
      const int cf = (n - c) % n;
      out[index(r, c)] = data[index(rf, cf)];
    }
  }
  data.swap(out);
}

struct Moments {
  double sum = 0.0;
  Vec2 centroid{};
};

Moments grid_moments(const std::vector<double>& in, int n, double pitch) {
  Moments m;
  double sx = 0.0, sy = 0.0;
  for (int r = 0; r < n; ++r) {
    const double y = (r - n / 2) * pitch;
    for (int c = 0; c < n; ++c) {
      const double v = in[static_cast<std::size_t>(r) * n + c];
      m.sum += v;
      sx += v * (c - n / 2) * pitch;
      sy += v * y;
    }
  }
  if (m.sum > 0) m.centroid = {sx / m.sum, sy / m.sum};
  return m;
}

// Realized-modulation sample on a coarse pupil grid: the cells are
// demodulated by the ideal profile before box-averaging, so only the
// slowly-varying deviation field is filtered; the full phase ramp is
// restored analytically at the sample point.
complexd demodulated_cell_average(const SampledModulation& mod, Vec2 p,
                                  double half_width,
                                  const PhaseProfile& profile) {
  const double origin = -0.5 * (mod.m - 1) * mod.pitch;
  int c0 = static_cast<int>(std::ceil((p.x - half_width - origin) / mod.pitch));
  int c1 = static_cast<int>(std::floor((p.x + half_width - origin) / mod.pitch));
  int r0 = static_cast<int>(std::ceil((p.y - half_width - origin) / mod.pitch));
  int r1 = static_cast<int>(std::floor((p.y + half_width - origin) / mod.pitch));
  c0 = std::max(c0, 0);
  r0 = std::max(r0, 0);
  c1 = std::min(c1, mod.m - 1);
  r1 = std::min(r1, mod.m - 1);
  complexd acc{};
  int count = 0;
  for (int r = r0; r <= r1; ++r) {
    const double y = origin + r * mod.pitch;
    for (int c = c0; c <= c1; ++c) {
      const double x = origin + c * mod.pitch;
      const complexd cell = mod.at(r, c);
      if (cell == complexd{}) continue;
      acc += cell * std::exp(complexd(0.0, -eval_phase(profile, {x, y})));
      ++count;
    }
  }
  if (count == 0) return {};
  return acc / static_cast<double>(count) *
         std::exp(complexd(0.0, eval_phase(profile, p)));
}

// Builds the pupil transmission Q(p) on an n x n grid of the given pitch:
// mask * e^{j phi} with decenter/tilt, or the resampled realized
// modulation when provided.
std::vector<complexd> build_pupil(const SystemGeometry& geom, int n,
                                  double pitch, const PsfOptions& opts) {
  std::vector<complexd> q(static_cast<std::size_t>(n) * n, complexd{});
  const auto& pert = opts.perturbation;
  const double k0 = wavenumber(geom.lambda0);
  const double cx = std::cos(pert.tilt_x);
  const double cy = std::cos(pert.tilt_y);
  for (int r = 0; r < n; ++r) {
    const double y = (r - n / 2) * pitch;
    for (int c = 0; c < n; ++c) {
      const double x = (c - n / 2) * pitch;
      const Vec2 p{x - pert.decenter.x, y - pert.decenter.y};
      if (opts.realized) {
        if (p.norm() > 0.5 * geom.eyepiece_mask.diameter) continue;
        q[static_cast<std::size_t>(r) * n + c] = demodulated_cell_average(
            *opts.realized, p, 0.5 * pitch, geom.profile);
        continue;
      }
      const double t = geom.eyepiece_mask.transmittance(p);
      if (t == 0.0) continue;
      const Vec2 proj{p.x * cx, p.y * cy};
      double phi = eval_phase(geom.profile, proj);
      phi += k0 * (std::sin(pert.tilt_x) * p.x + std::sin(pert.tilt_y) * p.y);
      q[static_cast<std::size_t>(r) * n + c] = t * std::exp(complexd(0.0, phi));
    }
  }
  return q;
}

PsfSample finish_sample(std::vector<double> intensity, int n, double pitch,
                        const PsfQuery& query, double power_fraction,
                        double ref_peak_unit) {
  PsfSample s;
  s.n = n;
  s.pitch = pitch;
  s.wavelength = query.lambda;
  s.distance = query.distance;
  s.field_point = query.x0;
  const auto mom = grid_moments(intensity, n, pitch);
  if (mom.sum > 0) {
    const double scale = power_fraction / mom.sum;
    for (auto& v : intensity) v *= scale;
  }
  s.centroid = mom.centroid;
  s.power_fraction = power_fraction;
  s.intensity = std::move(intensity);
  // Strehl against the unit-power diffraction-limited reference peak.
  double peak = 0.0;
  for (double v : s.intensity) peak = std::max(peak, v);
  if (ref_peak_unit > 0.0)
    s.strehl = std::min(1.0, (peak / power_fraction) / ref_peak_unit);
  return s;
}

PsfSample psf_pupil(const SystemGeometry& geom, const PsfQuery& query,
                    const PsfOptions& opts) {
  const int n = opts.n;
  const double py = opts.pitch > 0 ? opts.pitch : geom.sensor_pitch;
  const double s_sep = geom.s_sep;
  const double lam = query.lambda;
  const double pp = lam * s_sep / (n * py);
  const double k = wavenumber(lam);

  const auto pc = paraxial_coefficients(geom, object_depth(query.distance));
  const double chirp_coeff = 1.0 / s_sep + pc.a2;

  // Nyquist check on the net pupil-phase gradient (the profile slope and
  // the propagation chirp cancel near focus, so use the signed sum,
  // sampled at a few radii in case the extremum is interior).
  const double r_stop = 0.5 * geom.eyepiece_mask.diameter;
  double slope = 0.0;
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    const double r = frac * r_stop;
    // A realized modulation is demodulated against the same profile, so
    // its sampled pupil is exactly as smooth as the analytic one.
    const double prof = eval_phase_slope(geom.profile, r);
    slope = std::max(slope, std::abs(prof + k * chirp_coeff * r));
  }
  if (!opts.recenter) slope += std::abs(k * pc.b2) * query.x0.norm();
  const double fmax = slope / (2.0 * kPi);
  if (fmax > 1.0 / (2.0 * pp)) {
    const int min_n =
        static_cast<int>(std::ceil(2.0 * fmax * lam * s_sep / py));
    std::ostringstream os;
    os << "psf: pupil fringe frequency " << fmax * 1e-3
       << " cycles/mm exceeds the pupil grid Nyquist "
       << 1.0 / (2.0 * pp) * 1e-3 << " cycles/mm; need N >= " << min_n;
    throw SamplingError(os.str(), min_n);
  }

  std::vector<complexd> q = build_pupil(geom, n, pp, opts);

  // Transmitted power fraction: mean squared transmittance over the stop.
  double qpow = 0.0;
  for (const auto& v : q) qpow += std::norm(v);
  const double stop_area = kPi * r_stop * r_stop;
  const double power_fraction = qpow * pp * pp / stop_area;

  // Diffraction-limited reference: same amplitude, zero phase error. The
  // image translation (tilt term) is applied to both so the sub-pixel peak
  // placement cancels out of the Strehl ratio.
  std::vector<complexd> ref(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) ref[i] = std::abs(q[i]);

  for (int r = 0; r < n; ++r) {
    const double y = (r - n / 2) * pp;
    for (int c = 0; c < n; ++c) {
      const double x = (c - n / 2) * pp;
      const double tilt =
          opts.recenter
              ? 0.0
              : -k * pc.b2 * (query.x0.x * x + query.x0.y * y);
      const double chirp = 0.5 * k * chirp_coeff * (x * x + y * y);
      q[static_cast<std::size_t>(r) * n + c] *=
          std::exp(complexd(0.0, chirp + tilt));
      ref[static_cast<std::size_t>(r) * n + c] *=
          std::exp(complexd(0.0, tilt));
    }
  }

  flip2(q, n);
  centered_dft2(q, n);
  flip2(ref, n);
  centered_dft2(ref, n);

  std::vector<double> intensity(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) intensity[i] = std::norm(q[i]);
  double ref_sum = 0.0, ref_peak = 0.0;
  for (const auto& v : ref) {
    const double p2 = std::norm(v);
    ref_sum += p2;
    ref_peak = std::max(ref_peak, p2);
  }
  const double ref_peak_unit = ref_peak / ref_sum;

  PsfSample out = finish_sample(std::move(intensity), n, py, query,
                                power_fraction, ref_peak_unit);
  if (opts.recenter) {
    // The grid holds the pattern about its image point; report the true
    // sensor-plane centroid -gamma * x0 = s B2 x0 plus the pattern moment.
    out.centroid =
        out.centroid + geom.s_sep * pc.b2 * query.x0;
  }
  return out;
}

PsfSample psf_chain(const SystemGeometry& geom, const PsfQuery& query,
                    const PsfOptions& opts) {
  if (std::isinf(query.distance))
    throw DomainError("psf(chain): finite object distance required");
  if (opts.realized)
    throw DomainError("psf(chain): realized modulation needs the pupil path");
  const double w = query.distance;
  const double lam = query.lambda;

  // Beam footprint at the objective: the stop back-projected through the
  // objective for the converging input bundle, plus the chief-ray offset.
  const double t_factor = 1.0 - geom.m_sep * (1.0 / w + 1.0 / geom.f1);
  if (std::abs(t_factor) < 1e-6)
    throw DegenerateConjugateError("psf(chain): stop images onto objective");
  const double r_stop = 0.5 * geom.eyepiece_mask.diameter;
  const double beam_half =
      (r_stop + geom.m_sep * query.x0.norm() / w) / std::abs(t_factor);
  const double window = 2.4 * beam_half;
  // The eyepiece-plane window of the scaled transform is lambda*m*N/window;
  // it must still contain the stop, which sets a floor on N.
  const double extent_needed = 1.15 * geom.eyepiece_mask.diameter;
  int n = opts.n;
  const int n_floor = static_cast<int>(
      std::ceil(extent_needed * window / (lam * geom.m_sep) / 256.0) * 256);
  n = std::max(n, n_floor);
  GridSpec grid{n, window / n};

  ComplexField u0 =
      point_source_field(query.x0, object_depth(w), lam, grid);
  ComplexField u1 = apply_thin_lens(u0, geom.f1);
  ComplexField u2 = fresnel_propagate_scaled(u1, geom.m_sep);
  ComplexField u3 = apply_phase_profile(u2, geom.profile, geom.eyepiece_mask,
                                        opts.perturbation);
  const double transmitted = u3.total_power();
  const double incident = u2.total_power();
  ComplexField u4 = fresnel_propagate_scaled(u3, geom.s_sep);

  std::vector<double> intensity(u4.data().size());
  for (std::size_t i = 0; i < intensity.size(); ++i)
    intensity[i] = std::norm(u4.data()[i]);
  // Sensor coordinates are parity-flipped relative to the wave axes.
  {
    std::vector<complexd> tmp(intensity.size());
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = intensity[i];
    flip2(tmp, n);
    for (std::size_t i = 0; i < tmp.size(); ++i) intensity[i] = tmp[i].real();
  }

  // Diffraction-limited reference on the same output grid via the pupil
  // machinery (amplitude-only stop).
  const double py = u4.pitch();
  PsfOptions ref_opts = opts;
  ref_opts.pitch = py;
  ref_opts.path = PsfPath::kPupilIntegral;
  PsfQuery ref_query = query;
  ref_query.x0 = {};
  // Reference peak of the unit-power aberration-free pattern.
  SystemGeometry ref_geom = geom;
  ref_geom.profile = PhaseProfile::quadratic(
      effective_focal_length(geom.profile, geom.eyepiece_mask.diameter),
      geom.lambda0);
  ref_query.distance = focal_plane(ref_geom, lam);
  double ref_peak_unit = 0.0;
  if (ref_query.distance > 0 && std::isfinite(ref_query.distance)) {
    PsfSample ref = psf_pupil(ref_geom, ref_query, ref_opts);
    ref_peak_unit = ref.peak() / ref.power_fraction;
  }

  return finish_sample(std::move(intensity), n, py, query,
                       incident > 0 ? transmitted / incident : 0.0,
                       ref_peak_unit);
}

}  // namespace

double PsfSample::peak() const {
  double p = 0.0;
  for (double v : intensity) p = std::max(p, v);
  return p;
}

double PsfSample::second_moment_radius() const {
  double sum = 0.0, m2 = 0.0;
  for (int r = 0; r < n; ++r) {
    const double y = coord(r) - centroid.y;
    for (int c = 0; c < n; ++c) {
      const double x = coord(c) - centroid.x;
      const double v = at(r, c);
      sum += v;
      m2 += v * (x * x + y * y);
    }
  }
  return sum > 0 ? std::sqrt(m2 / sum) : 0.0;
}

PsfSample psf(const SystemGeometry& geom, const PsfQuery& query,
              const PsfOptions& opts) {
  geom.validate();
  if (opts.path == PsfPath::kFieldChain) return psf_chain(geom, query, opts);
  return psf_pupil(geom, query, opts);
}

std::vector<PsfSample> psf_batch(const SystemGeometry& geom,
                                 const std::vector<PsfQuery>& queries,
                                 const PsfOptions& opts, int workers) {
  std::vector<PsfSample> out(queries.size());
  parallel_for(queries.size(), workers, [&](std::size_t i) {
    out[i] = psf(geom, queries[i], opts);
  });
  return out;
}

}  // namespace metatele
