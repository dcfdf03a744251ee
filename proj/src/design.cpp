#include "metatele/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "metatele/psf.hpp"

namespace metatele {

namespace {

// MTF of an ideal circular pupil reaches kDesignMtfThreshold at this
// fraction of the incoherent cutoff frequency.
constexpr double kCircMtfInvAtThreshold = 0.8067;

// Nine design variables in native units: c1..c7 (mm-based polynomial
// coefficients), m and s in millimeters.
using DesignVec = std::array<double, 9>;

DesignVec pack(const SystemGeometry& g) {
  DesignVec x{};
  std::array<double, 7> c{};
  if (g.profile.kind == ProfileKind::kPolynomial) {
    c = g.profile.coeffs;
  } else {
    // Quadratic-power kinds map onto the leading polynomial coefficient:
    // c1 = -1/(2 f_mm).
    c[0] = -1.0 / (2.0 * (g.profile.focal / mm));
  }
  for (int i = 0; i < 7; ++i) x[i] = c[i];
  x[7] = g.m_sep / mm;
  x[8] = g.s_sep / mm;
  return x;
}

SystemGeometry unpack(const SystemGeometry& base, const DesignVec& x) {
  SystemGeometry g = base;
  std::array<double, 7> c{};
  for (int i = 0; i < 7; ++i) c[i] = x[i];
  g.profile = PhaseProfile::polynomial(c, base.lambda0);
  g.m_sep = x[7] * mm;
  g.s_sep = x[8] * mm;
  return g;
}

struct FastMetrics {
  double ratio = 1e9;
  double strehl_proxy = 0.0;
  double cutoff_proxy = 0.0;
  double track = 0.0;
  // 0 when a positive finite focal plane exists; grows smoothly with the
  // depth of the violation so the simplex is steered back rather than
  // walled off by a cliff.
  double focus_violation = 1e3;
  bool evaluable = false;

  bool proxy_feasible(const DesignConstraints& con) const {
    return evaluable && focus_violation == 0.0 &&
           strehl_proxy >= con.strehl_floor &&
           cutoff_proxy >= con.cutoff_floor && track <= con.track_budget;
  }
};

FastMetrics fast_metrics(const SystemGeometry& g) {
  FastMetrics fm;
  fm.track = g.ttl();
  if (!(g.m_sep > 0.1 * mm) || !(g.s_sep > 0.1 * mm)) return fm;
  if (!(g.f1 - g.m_sep > 1e-4 * mm)) return fm;  // keep EFL positive
  const double efl = g.s_sep * g.f1 / (g.f1 - g.m_sep);
  fm.ratio = fm.track / efl;
  try {
    const double zf = focal_plane(g, g.lambda0);
    if (std::isfinite(zf) && zf > 0) {
      fm.focus_violation = 0.0;
    } else if (std::isfinite(zf)) {
      // Virtual conjugate: penalize harder the closer it sits.
      fm.focus_violation = 1.0 + 100 * mm / std::max(std::abs(zf), 1 * mm);
    } else {
      fm.focus_violation = 1.0;
    }
  } catch (const Error&) {
    fm.focus_violation = 2.0;
  }
  // Quadratic-fit Strehl proxy (Marechal) from the non-quadratic phase
  // residual over the stop.
  const auto fit = fit_quadratic(g.profile, g.eyepiece_mask.diameter);
  fm.strehl_proxy = std::exp(-fit.rms_residual * fit.rms_residual);
  // Slightly conservative against the sampled-MTF measurement, so a
  // proxy-feasible iterate also verifies feasible.
  fm.cutoff_proxy = 0.995 * kCircMtfInvAtThreshold *
                    g.eyepiece_mask.diameter / (g.lambda0 * g.s_sep);
  fm.evaluable = true;
  return fm;
}

double penalty_value(const FastMetrics& fm, const DesignConstraints& con,
                     double mu) {
  if (!fm.evaluable) return 1e12;
  double p = fm.ratio;
  auto viol = [](double v) { return v > 0 ? v * v : 0.0; };
  // Normalized constraint violations.
  p += mu * viol((con.strehl_floor - fm.strehl_proxy) / 0.1);
  p += mu * viol((con.cutoff_floor - fm.cutoff_proxy) / con.cutoff_floor);
  p += mu * viol((fm.track - con.track_budget) / con.track_budget);
  p += mu * fm.focus_violation * fm.focus_violation;
  return p;
}

}  // namespace

void DesignConstraints::validate() const {
  if (!(strehl_floor > 0) || strehl_floor > 1.0)
    throw DomainError("DesignConstraints: C must be in (0, 1]");
  if (!(cutoff_floor > 0)) throw DomainError("DesignConstraints: f_N <= 0");
  if (!(angle_max_deg > 0)) throw DomainError("DesignConstraints: theta_max <= 0");
  if (!(track_budget > 0)) throw DomainError("DesignConstraints: s_M <= 0");
}

DesignReport verify_design(const SystemGeometry& geom,
                           const DesignConstraints& con,
                           const DesignOptions& opts) {
  DesignReport rep;
  const double w = focal_plane(geom, geom.lambda0);
  if (!(w > 0) || !std::isfinite(w))
    throw DomainError("verify_design: geometry has no positive focal plane");

  PsfOptions popts;
  popts.n = opts.verify_n;
  popts.recenter = true;
  std::vector<PsfQuery> queries;
  for (int i = 0; i < opts.angle_grid; ++i) {
    const double th = deg2rad(con.angle_max_deg * i / (opts.angle_grid - 1));
    queries.push_back({w, geom.lambda0, {w * std::tan(th), 0.0}});
  }
  const auto samples = psf_batch(geom, queries, popts, opts.workers);
  rep.feasible = true;
  for (int i = 0; i < opts.angle_grid; ++i) {
    AngleMargin am;
    am.angle_deg = con.angle_max_deg * i / (opts.angle_grid - 1);
    am.strehl = samples[i].strehl;
    am.margin = am.strehl - con.strehl_floor;
    if (am.margin < 0) rep.feasible = false;
    rep.strehl_margins.push_back(am);
  }
  rep.cutoff = mtf(samples[0]).cutoff(kDesignMtfThreshold);
  rep.cutoff_margin = rep.cutoff - con.cutoff_floor;
  rep.track = geom.ttl();
  rep.track_margin = con.track_budget - rep.track;
  if (rep.cutoff_margin < 0 || rep.track_margin < 0) rep.feasible = false;
  rep.final_ratio = magnification_and_efl(geom, w).telephoto_ratio;
  return rep;
}

DesignResult optimize_design(const SystemGeometry& init,
                             const DesignConstraints& con,
                             const DesignOptions& opts) {
  init.validate();
  con.validate();
  {
    const FastMetrics fm0 = fast_metrics(init);
    if (!fm0.evaluable)
      throw DomainError(
          "optimize_design: infeasible start, initial geometry is not "
          "evaluable (no positive focal plane or degenerate separations)");
  }

  const DesignVec x_init = pack(init);
  DesignVec best = x_init;
  double best_ratio_feasible = 1e18;
  DesignVec best_feasible = x_init;
  bool have_feasible = false;
  std::vector<double> trace;

  double mu = opts.penalty_start;
  DesignVec x0 = x_init;
  int total_iters = 0;

  for (int stage = 0; stage < opts.penalty_stages; ++stage, mu *= opts.penalty_growth) {
    // Nelder-Mead on the 9-vector with the stage's penalty weight.
    auto cost = [&](const DesignVec& x) {
      return penalty_value(fast_metrics(unpack(init, x)), con, mu);
    };

    constexpr int kDim = 9;
    std::array<DesignVec, kDim + 1> simplex;
    std::array<double, kDim + 1> f;
    simplex[0] = x0;
    for (int i = 0; i < kDim; ++i) {
      simplex[i + 1] = x0;
      const double step =
          (i < 7) ? std::max(0.02, 0.05 * std::abs(x0[i])) : 0.15;
      simplex[i + 1][i] += step;
    }
    for (int i = 0; i <= kDim; ++i) f[i] = cost(simplex[i]);

    for (int it = 0; it < opts.max_iterations_per_stage; ++it, ++total_iters) {
      // Order
      std::array<int, kDim + 1> idx;
      for (int i = 0; i <= kDim; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(),
                [&](int a, int b) { return f[a] < f[b]; });
      const int lo = idx[0], hi = idx[kDim], nh = idx[kDim - 1];

      {
        const FastMetrics fm = fast_metrics(unpack(init, simplex[lo]));
        trace.push_back(fm.ratio);
        if (fm.proxy_feasible(con) && fm.ratio < best_ratio_feasible) {
          best_ratio_feasible = fm.ratio;
          best_feasible = simplex[lo];
          have_feasible = true;
        }
      }

      // Convergence: simplex collapsed in cost.
      if (std::abs(f[hi] - f[lo]) <
          1e-12 * (std::abs(f[lo]) + std::abs(f[hi])) + 1e-14)
        break;

      DesignVec centroid{};
      for (int i = 0; i <= kDim; ++i) {
        if (i == hi) continue;
        for (int d = 0; d < kDim; ++d) centroid[d] += simplex[i][d];
      }
      for (int d = 0; d < kDim; ++d) centroid[d] /= kDim;

      auto affine = [&](double t) {
        DesignVec x;
        for (int d = 0; d < kDim; ++d)
          x[d] = centroid[d] + t * (simplex[hi][d] - centroid[d]);
        return x;
      };

      const DesignVec xr = affine(-1.0);
      const double fr = cost(xr);
      if (fr < f[lo]) {
        const DesignVec xe = affine(-2.0);
        const double fe = cost(xe);
        if (fe < fr) {
          simplex[hi] = xe;
          f[hi] = fe;
        } else {
          simplex[hi] = xr;
          f[hi] = fr;
        }
      } else if (fr < f[nh]) {
        simplex[hi] = xr;
        f[hi] = fr;
      } else {
        const DesignVec xc = affine(fr < f[hi] ? -0.5 : 0.5);
        const double fc = cost(xc);
        if (fc < std::min(fr, f[hi])) {
          simplex[hi] = xc;
          f[hi] = fc;
        } else {
          // Shrink toward the best vertex.
          for (int i = 0; i <= kDim; ++i) {
            if (i == lo) continue;
            for (int d = 0; d < kDim; ++d)
              simplex[i][d] =
                  simplex[lo][d] + 0.5 * (simplex[i][d] - simplex[lo][d]);
            f[i] = cost(simplex[i]);
          }
        }
      }
      best = simplex[lo];
    }
    // Later stages restart from the best feasible iterate when one exists,
    // anchoring the polish inside the feasible basin.
    x0 = have_feasible ? best_feasible : best;
  }

  DesignResult result;
  result.geometry = unpack(init, have_feasible ? best_feasible : best);
  result.report = verify_design(result.geometry, con, opts);
  result.report.iterations = total_iters;
  result.report.ratio_trace = std::move(trace);
  {
    const FastMetrics fm0 = fast_metrics(init);
    result.report.initial_ratio = fm0.ratio;
  }
  if (!result.report.feasible)
    result.report.notes =
        "non-convergence: best iterate returned, constraints not all met "
        "under wave verification";
  return result;
}

void DesignReport::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("DesignReport: cannot write " + path);
  out.precision(12);
  out << "{\n  \"iterations\": " << iterations
      << ",\n  \"feasible\": " << (feasible ? "true" : "false")
      << ",\n  \"initial_ratio\": " << initial_ratio
      << ",\n  \"final_ratio\": " << final_ratio
      << ",\n  \"cutoff_lp_per_mm\": " << cutoff * 1e-3
      << ",\n  \"cutoff_margin_lp_per_mm\": " << cutoff_margin * 1e-3
      << ",\n  \"track_mm\": " << track / mm
      << ",\n  \"track_margin_mm\": " << track_margin / mm
      << ",\n  \"strehl_margins\": [";
  for (std::size_t i = 0; i < strehl_margins.size(); ++i) {
    const auto& am = strehl_margins[i];
    out << (i ? "," : "") << "\n    {\"angle_deg\": " << am.angle_deg
        << ", \"strehl\": " << am.strehl << ", \"margin\": " << am.margin
        << "}";
  }
  out << "\n  ],\n  \"ratio_trace\": [";
  for (std::size_t i = 0; i < ratio_trace.size(); ++i)
    out << (i ? "," : "") << ratio_trace[i];
  out << "],\n  \"notes\": \"" << notes << "\"\n}\n";
}

}  // namespace metatele
