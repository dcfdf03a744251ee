// Temporary scratch checks during bring-up.
#include <cstdio>

#include "metatele/config.hpp"
#include "metatele/focus_zoom.hpp"
#include "metatele/mtf.hpp"
#include "metatele/psf.hpp"
#include "metatele/spot.hpp"

using namespace metatele;

int main() {
  SystemGeometry g = production_geometry();
  const double zf = focal_plane(g, g.lambda0);
  std::printf("z_f(532nm) = %.4f mm\n", zf / mm);
  const auto sc = magnification_and_efl(g, 1e6 * g.f1);
  std::printf("EFL = %.6f mm, TTL = %.3f mm, ratio = %.6f\n", sc.efl / mm,
              g.ttl() / mm, sc.telephoto_ratio);
  const auto sc2 = magnification_and_efl(g, zf);
  std::printf("gamma(z_f) = %.6f\n", sc2.gamma);
  std::printf("delta(z_f, 532) = %.3e 1/m\n",
              residual_defocus(g, zf, 532 * nm));
  std::printf("delta(z_f, 620) = %.3e 1/m\n",
              residual_defocus(g, zf, 620 * nm));
  std::printf("z_f(620nm) = %.4f mm, z_f(480) = %.4f mm\n",
              focal_plane(g, 620 * nm) / mm, focal_plane(g, 480 * nm) / mm);
  const double s673 = autofocus_solve(g, 673 * mm);
  std::printf("autofocus(673mm): s = %.6f mm\n", s673 / mm);
  const double szf = autofocus_solve(g, zf);
  std::printf("autofocus(z_f): s = %.6f mm (nominal 7.6)\n", szf / mm);

  PsfOptions po;
  po.n = 1024;
  PsfSample on_axis = psf(g, {zf, g.lambda0, {}});
  std::printf("on-axis strehl = %.4f, power fraction = %.4f, centroid = "
              "(%.3f, %.3f) um\n",
              on_axis.strehl, on_axis.power_fraction, on_axis.centroid.x / um,
              on_axis.centroid.y / um);
  const auto curve = mtf(on_axis);
  std::printf("mtf cutoff@0.1 = %.2f lp/mm, @0.2 = %.2f lp/mm, mtf50 = %.2f\n",
              curve.cutoff(0.1) * 1e-3, curve.cutoff(0.2) * 1e-3,
              curve.mtf50() * 1e-3);

  // Off-axis translation.
  PsfSample off = psf(g, {zf, g.lambda0, {0.3 * mm, 0.0}});
  std::printf("off-axis centroid = (%.3f, %.3f) um, predicted -gamma*x0 = "
              "%.3f um, strehl %.4f\n",
              off.centroid.x / um, off.centroid.y / um,
              -sc2.gamma * 0.3 * mm / um, off.strehl);

  // Spot RMS with the polynomial profile.
  SystemGeometry gp = production_geometry_polynomial();
  std::printf("poly fit f2 = %.5f mm\n",
              fit_quadratic(gp.profile, 0.8 * mm).focal / mm);
  for (double a : {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const auto spot = spot_trace(gp, a, 2000);
    std::printf("spot rms @%.1f deg = %.3f um\n", a, spot.rms / um);
  }
  // Chain vs pupil quick check.
  PsfOptions chain_opts;
  chain_opts.n = 1024;
  chain_opts.path = PsfPath::kFieldChain;
  PsfSample chain = psf(g, {zf, g.lambda0, {}}, chain_opts);
  std::printf("chain: n=%d pitch=%.3f um strehl=%.4f centroid=(%.2f, %.2f) um\n",
              chain.n, chain.pitch / um, chain.strehl, chain.centroid.x / um,
              chain.centroid.y / um);
  return 0;
}
