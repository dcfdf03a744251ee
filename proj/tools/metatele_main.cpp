// Batch front-end: reproducible runs over the optical toolkit. Every
// subcommand echoes its configuration into a run manifest next to its
// artifacts. Physical flags require unit suffixes (5mm, 532nm, 3deg);
// bare numbers are rejected.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "metatele/config.hpp"
#include "metatele/design.hpp"
#include "metatele/focus_zoom.hpp"
#include "metatele/io.hpp"
#include "metatele/manifest.hpp"
#include "metatele/mtf.hpp"
#include "metatele/nanocell.hpp"
#include "metatele/psf.hpp"
#include "metatele/rapsd.hpp"
#include "metatele/render.hpp"
#include "metatele/spot.hpp"
#include "metatele/tolerance.hpp"

using namespace metatele;

namespace {

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

double parse_with_units(const std::string& text,
                        const std::map<std::string, double>& units,
                        const std::string& kind) {
  std::size_t pos = 0;
  double value;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + kind + " quantity \"" + text + "\"");
  }
  std::string suffix = text.substr(pos);
  while (!suffix.empty() && suffix.front() == ' ') suffix.erase(0, 1);
  auto it = units.find(suffix);
  if (it == units.end()) {
    std::string allowed;
    for (const auto& [k, v] : units) allowed += k + " ";
    throw UsageError("missing or unknown " + kind + " unit on \"" + text +
                     "\" (expected one of: " + allowed + ")");
  }
  return value * it->second;
}

double parse_length(const std::string& s) {
  return parse_with_units(
      s, {{"m", 1.0}, {"mm", mm}, {"um", um}, {"µm", um}, {"nm", nm}},
      "length");
}

double parse_angle_deg(const std::string& s) {
  const double rad = parse_with_units(
      s, {{"deg", kPi / 180.0}, {"rad", 1.0}}, "angle");
  return rad * 180.0 / kPi;
}

double parse_time(const std::string& s) {
  return parse_with_units(s, {{"s", 1.0}, {"ms", 1e-3}}, "time");
}

struct GlobalArgs {
  bool json = false;
  std::string out_dir;
  std::uint64_t seed = 0;
  int workers = 1;
};

void emit(const GlobalArgs& g, const nlohmann::json& j,
          const std::string& human) {
  if (g.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << human;
}

RunManifest start_manifest(const std::string& sub, const GlobalArgs& g) {
  RunManifest m;
  m.subcommand = sub;
  m.seed = g.seed;
  m.config["workers"] = std::to_string(g.workers);
  return m;
}

void finish_manifest(RunManifest& m, const GlobalArgs& g) {
  if (g.out_dir.empty()) return;
  io::ensure_directory(g.out_dir);
  m.save(g.out_dir + "/" + m.subcommand + "-manifest.json");
}

SystemGeometry geometry_from(const std::string& path, RunManifest& man) {
  if (path.empty()) return production_geometry();
  man.add_input(path);
  man.config["geometry"] = path;
  return load_geometry(path);
}

SensorModel sensor_from(const std::string& path, RunManifest& man) {
  if (path.empty()) return SensorModel{};
  man.add_input(path);
  man.config["sensor"] = path;
  return load_sensor(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metatele: hybrid refractive-metasurface telephoto toolkit"};
  app.require_subcommand(1);
  GlobalArgs g;
  app.add_flag("--json", g.json, "machine-readable stdout");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--seed", g.seed, "64-bit run seed");
  app.add_option("--workers", g.workers, "worker thread count");

  // --- hyperfocal ---
  auto* cmd_hyper = app.add_subcommand("hyperfocal", "depth-of-field numbers");
  std::string hf_epd = "5mm", hf_efl = "30mm", hf_lambda = "532nm",
              hf_pitch = "2um";
  cmd_hyper->add_option("--epd", hf_epd, "entrance pupil diameter");
  cmd_hyper->add_option("--efl", hf_efl, "effective focal length");
  cmd_hyper->add_option("--lambda", hf_lambda, "wavelength");
  cmd_hyper->add_option("--pitch", hf_pitch, "sensor pixel pitch");

  // --- psf ---
  auto* cmd_psf = app.add_subcommand("psf", "sensor-plane PSF synthesis");
  std::string psf_geom, psf_lambda = "532nm", psf_z0 = "auto";
  std::vector<std::string> psf_angles{"0deg"};
  std::vector<std::string> psf_lambdas;
  int psf_n = 1024;
  bool psf_chain = false;
  cmd_psf->add_option("--geometry", psf_geom, "geometry JSON");
  cmd_psf->add_option("--lambda", psf_lambda, "wavelength");
  cmd_psf->add_option("--lambdas", psf_lambdas, "stack wavelengths");
  cmd_psf->add_option("--angle", psf_angles, "field angle(s)");
  cmd_psf->add_option("--z0", psf_z0, "object distance or 'auto' (focal plane)");
  cmd_psf->add_option("--n", psf_n, "grid size");
  cmd_psf->add_flag("--chain", psf_chain, "use the end-to-end field chain");

  // --- mtf ---
  auto* cmd_mtf = app.add_subcommand("mtf", "radial MTF of the on-axis PSF");
  std::string mtf_geom, mtf_lambda = "532nm";
  int mtf_n = 1024;
  cmd_mtf->add_option("--geometry", mtf_geom, "geometry JSON");
  cmd_mtf->add_option("--lambda", mtf_lambda, "wavelength");
  cmd_mtf->add_option("--n", mtf_n, "grid size");

  // --- spot ---
  auto* cmd_spot = app.add_subcommand("spot", "geometric spot diagram");
  std::string spot_geom;
  std::vector<std::string> spot_angles{"0deg"};
  int spot_rays = 2000;
  cmd_spot->add_option("--geometry", spot_geom, "geometry JSON");
  cmd_spot->add_option("--angle", spot_angles, "field angle(s)");
  cmd_spot->add_option("--rays", spot_rays, "ray count");

  // --- tolerance ---
  auto* cmd_tol = app.add_subcommand("tolerance", "perturbation sweep");
  std::string tol_geom, tol_element = "eyepiece", tol_dof = "lateral-x",
              tol_max = "0.04mm";
  int tol_samples = 5, tol_n = 512;
  cmd_tol->add_option("--geometry", tol_geom, "geometry JSON");
  cmd_tol->add_option("--element", tol_element, "objective|eyepiece|sensor");
  cmd_tol->add_option("--dof", tol_dof,
                      "lateral-x|lateral-y|longitudinal-z|tilt-x|tilt-y");
  cmd_tol->add_option("--max", tol_max, "maximum magnitude (length or angle)");
  cmd_tol->add_option("--samples", tol_samples, "sweep points");
  cmd_tol->add_option("--n", tol_n, "PSF grid size");

  // --- zoom ---
  auto* cmd_zoom = app.add_subcommand("zoom", "solve separations for an EFL");
  std::string zoom_geom, zoom_efl = "30mm", zoom_z0 = "673mm";
  cmd_zoom->add_option("--geometry", zoom_geom, "geometry JSON");
  cmd_zoom->add_option("--efl", zoom_efl, "target EFL in [20mm, 50mm]");
  cmd_zoom->add_option("--z0", zoom_z0, "reference object distance");

  // --- focus ---
  auto* cmd_focus = app.add_subcommand("focus", "autofocus separation");
  std::string focus_geom, focus_z0 = "673mm";
  cmd_focus->add_option("--geometry", focus_geom, "geometry JSON");
  cmd_focus->add_option("--z0", focus_z0, "object distance");

  // --- layout ---
  auto* cmd_layout = app.add_subcommand("layout", "nanopillar layout synthesis");
  std::string lay_geom, lay_lut = "data/lut/nanocell_lut_synthetic.csv",
              lay_aperture = "0.8mm";
  cmd_layout->add_option("--geometry", lay_geom, "geometry JSON (profile source)");
  cmd_layout->add_option("--lut", lay_lut, "nanocell LUT CSV");
  cmd_layout->add_option("--aperture", lay_aperture, "aperture diameter");

  // --- render ---
  auto* cmd_render = app.add_subcommand("render", "two-shot measurement render");
  std::string ren_geom, ren_sensor, ren_scene, ren_channel = "pair",
              ren_z0 = "673mm", ren_display = "7.6mm";
  std::string ren_exposure, ren_band_center, ren_band_fwhm;
  double ren_gain = -1.0;
  bool ren_no_noise = false, ren_shift_variant = false;
  int ren_psf_n = 1024;
  cmd_render->add_option("--geometry", ren_geom, "geometry JSON");
  cmd_render->add_option("--sensor", ren_sensor, "sensor JSON");
  cmd_render->add_option("--scene", ren_scene, "scene PNG")->required();
  cmd_render->add_option("--channel", ren_channel, "structure|color|pair");
  cmd_render->add_option("--z0", ren_z0, "scene depth");
  cmd_render->add_option("--display-width", ren_display, "scene physical width");
  cmd_render->add_option("--exposure", ren_exposure, "override exposure (s)");
  cmd_render->add_option("--gain", ren_gain, "override gain (DN/e-)");
  cmd_render->add_option("--band-center", ren_band_center, "structure band center");
  cmd_render->add_option("--band-fwhm", ren_band_fwhm, "structure band FWHM");
  cmd_render->add_flag("--no-noise", ren_no_noise, "disable sensor noise");
  cmd_render->add_flag("--shift-variant", ren_shift_variant,
                       "3x3 PSF-grid interpolation mode");
  cmd_render->add_option("--psf-n", ren_psf_n, "PSF kernel grid");

  // --- dataset ---
  auto* cmd_ds = app.add_subcommand("dataset", "paired dataset generation");
  std::string ds_geom, ds_sensor, ds_scenes, ds_z0 = "673mm",
              ds_display = "7.6mm";
  int ds_count = 10, ds_psf_n = 1024;
  bool ds_no_noise = false;
  cmd_ds->add_option("--geometry", ds_geom, "geometry JSON");
  cmd_ds->add_option("--sensor", ds_sensor, "sensor JSON");
  cmd_ds->add_option("--scenes", ds_scenes, "scene directory")->required();
  cmd_ds->add_option("--count", ds_count, "number of triples");
  cmd_ds->add_option("--z0", ds_z0, "scene depth");
  cmd_ds->add_option("--display-width", ds_display, "scene physical width");
  cmd_ds->add_flag("--no-noise", ds_no_noise, "disable sensor noise");
  cmd_ds->add_option("--psf-n", ds_psf_n, "PSF kernel grid");

  // --- rapsd ---
  auto* cmd_rapsd = app.add_subcommand("rapsd", "radially averaged PSD");
  std::string rp_image, rp_pitch = "2um";
  int rp_channel = 0;
  cmd_rapsd->add_option("--image", rp_image, "PNG or PFM image")->required();
  cmd_rapsd->add_option("--pitch", rp_pitch, "pixel pitch");
  cmd_rapsd->add_option("--channel", rp_channel, "channel for color inputs");

  // --- design ---
  auto* cmd_design = app.add_subcommand("design", "telephoto-ratio optimization");
  std::string dsn_geom, dsn_theta = "3deg", dsn_budget = "13.2mm";
  double dsn_strehl = 0.13, dsn_cutoff_lpmm = 250.0;
  int dsn_iters = 400, dsn_verify_n = 512;
  cmd_design->add_option("--geometry", dsn_geom, "initial geometry JSON");
  cmd_design->add_option("--strehl-floor", dsn_strehl, "Strehl constraint C");
  cmd_design->add_option("--cutoff-floor", dsn_cutoff_lpmm,
                         "MTF cutoff constraint, lp/mm");
  cmd_design->add_option("--theta-max", dsn_theta, "field constraint angle");
  cmd_design->add_option("--budget", dsn_budget, "track budget s_M");
  cmd_design->add_option("--iters", dsn_iters, "iterations per penalty stage");
  cmd_design->add_option("--verify-n", dsn_verify_n, "verification PSF grid");

  try {
    app.parse(argc, argv);

    if (*cmd_hyper) {
      RunManifest man = start_manifest("hyperfocal", g);
      const double epd = parse_length(hf_epd), efl = parse_length(hf_efl);
      const double lam = parse_length(hf_lambda),
                   pitch = parse_length(hf_pitch);
      const auto h = hyperfocal(epd, efl, lam, pitch);
      man.config = {{"epd", hf_epd},
                    {"efl", hf_efl},
                    {"lambda", hf_lambda},
                    {"pitch", hf_pitch}};
      nlohmann::json j = {{"f_number", h.f_number},
                          {"airy_diameter_um", h.airy_diameter / um},
                          {"coc_um", h.circle_of_confusion / um},
                          {"hyperfocal_m", h.hyperfocal},
                          {"near_limit_m", h.near_limit},
                          {"pixel_limited", h.pixel_limited}};
      std::ostringstream os;
      os.precision(4);
      os << "N = " << h.f_number << "\n"
         << "d_Airy = " << h.airy_diameter / um << " um\n"
         << "coc = " << h.circle_of_confusion / um << " um ("
         << (h.pixel_limited ? "pixel" : "diffraction") << "-limited)\n"
         << "H_eff = " << h.hyperfocal << " m\n"
         << "near limit = " << h.near_limit << " m\n";
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_psf) {
      RunManifest man = start_manifest("psf", g);
      SystemGeometry geom = geometry_from(psf_geom, man);
      std::vector<double> lambdas;
      if (psf_lambdas.empty())
        lambdas.push_back(parse_length(psf_lambda));
      else
        for (const auto& s : psf_lambdas) lambdas.push_back(parse_length(s));
      const double z0 = psf_z0 == "auto" ? focal_plane(geom, geom.lambda0)
                                         : parse_length(psf_z0);
      PsfOptions popts;
      popts.n = psf_n;
      popts.path = psf_chain ? PsfPath::kFieldChain : PsfPath::kPupilIntegral;
      std::vector<PsfQuery> queries;
      std::vector<double> angles;
      for (const auto& astr : psf_angles) {
        const double a = parse_angle_deg(astr);
        for (double lam : lambdas) {
          queries.push_back({z0, lam, {z0 * std::tan(deg2rad(a)), 0.0}});
          angles.push_back(a);
        }
      }
      const auto samples = psf_batch(geom, queries, popts, g.workers);
      nlohmann::json index = nlohmann::json::array();
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        nlohmann::json e = {{"wavelength_nm", s.wavelength / nm},
                            {"field_angle_deg", angles[i]},
                            {"pitch_nm", s.pitch / nm},
                            {"strehl", s.strehl},
                            {"centroid_um", {s.centroid.x / um, s.centroid.y / um}},
                            {"power_fraction", s.power_fraction}};
        if (!g.out_dir.empty()) {
          io::ensure_directory(g.out_dir);
          char name[64];
          std::snprintf(name, sizeof name, "psf_%03zu", i);
          const std::string base = g.out_dir + "/" + name;
          io::save_pfm(base + ".pfm", s.intensity, s.n, s.n);
          io::save_png16(base + ".png", s.intensity, s.n, s.n);
          e["pfm"] = base + ".pfm";
          man.outputs.push_back(base + ".pfm");
        }
        index.push_back(e);
      }
      if (!g.out_dir.empty()) {
        std::ofstream idx(g.out_dir + "/psf-index.json");
        idx << index.dump(2) << "\n";
      }
      std::ostringstream os;
      for (std::size_t i = 0; i < samples.size(); ++i)
        os << "psf[" << i << "] lambda=" << samples[i].wavelength / nm
           << "nm angle=" << angles[i] << "deg strehl=" << samples[i].strehl
           << "\n";
      emit(g, index, os.str());
      finish_manifest(man, g);
    } else if (*cmd_mtf) {
      RunManifest man = start_manifest("mtf", g);
      SystemGeometry geom = geometry_from(mtf_geom, man);
      const double lam = parse_length(mtf_lambda);
      const double z0 = focal_plane(geom, geom.lambda0);
      PsfOptions popts;
      popts.n = mtf_n;
      const PsfSample s = psf(geom, {z0, lam, {}}, popts);
      const MtfCurve curve = mtf(s);
      nlohmann::json j = {
          {"cutoff_design_lp_per_mm", curve.cutoff(kDesignMtfThreshold) * 1e-3},
          {"cutoff_0p2_lp_per_mm", curve.cutoff(0.2) * 1e-3},
          {"mtf50_lp_per_mm", curve.mtf50() * 1e-3}};
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        curve.save_csv(g.out_dir + "/mtf.csv");
        man.outputs.push_back(g.out_dir + "/mtf.csv");
      }
      std::ostringstream os;
      os << "cutoff@" << kDesignMtfThreshold << " = "
         << curve.cutoff(kDesignMtfThreshold) * 1e-3 << " lp/mm\n"
         << "cutoff@0.2 = " << curve.cutoff(0.2) * 1e-3 << " lp/mm\n";
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_spot) {
      RunManifest man = start_manifest("spot", g);
      SystemGeometry geom = geometry_from(spot_geom, man);
      nlohmann::json j = nlohmann::json::array();
      std::ostringstream os;
      for (std::size_t i = 0; i < spot_angles.size(); ++i) {
        const double a = parse_angle_deg(spot_angles[i]);
        const SpotDiagram spot = spot_trace(geom, a, spot_rays);
        j.push_back({{"angle_deg", a}, {"rms_um", spot.rms / um}});
        os << "spot rms @" << a << " deg = " << spot.rms / um << " um\n";
        if (!g.out_dir.empty()) {
          io::ensure_directory(g.out_dir);
          char name[64];
          std::snprintf(name, sizeof name, "/spot_%03zu.csv", i);
          spot.save_csv(g.out_dir + name);
          man.outputs.push_back(g.out_dir + name);
        }
      }
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_tol) {
      RunManifest man = start_manifest("tolerance", g);
      SystemGeometry geom = geometry_from(tol_geom, man);
      PerturbationSpec spec;
      if (tol_element == "objective") spec.element = PerturbElement::kObjective;
      else if (tol_element == "eyepiece") spec.element = PerturbElement::kEyepiece;
      else if (tol_element == "sensor") spec.element = PerturbElement::kSensor;
      else throw UsageError("unknown element " + tol_element);
      if (tol_dof == "lateral-x") spec.dof = PerturbDof::kLateralX;
      else if (tol_dof == "lateral-y") spec.dof = PerturbDof::kLateralY;
      else if (tol_dof == "longitudinal-z") spec.dof = PerturbDof::kLongitudinalZ;
      else if (tol_dof == "tilt-x") spec.dof = PerturbDof::kTiltX;
      else if (tol_dof == "tilt-y") spec.dof = PerturbDof::kTiltY;
      else throw UsageError("unknown dof " + tol_dof);
      spec.magnitude_max =
          (spec.dof == PerturbDof::kTiltX || spec.dof == PerturbDof::kTiltY)
              ? deg2rad(parse_angle_deg(tol_max))
              : parse_length(tol_max);
      spec.sample_count = tol_samples;
      ToleranceOptions topts;
      topts.n = tol_n;
      const auto curve = tolerance_sweep(geom, spec, topts, g.workers);
      nlohmann::json j = nlohmann::json::array();
      std::ostringstream os;
      for (std::size_t i = 0; i < curve.magnitude.size(); ++i) {
        j.push_back({{"magnitude", curve.magnitude[i]},
                     {"mean_strehl", curve.mean_strehl[i]}});
        os << curve.magnitude[i] << " -> " << curve.mean_strehl[i] << "\n";
      }
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        curve.save_csv(g.out_dir + "/tolerance.csv");
        man.outputs.push_back(g.out_dir + "/tolerance.csv");
      }
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_zoom) {
      RunManifest man = start_manifest("zoom", g);
      SystemGeometry geom = geometry_from(zoom_geom, man);
      const auto sol = zoom_solve(geom, parse_length(zoom_efl),
                                  parse_length(zoom_z0));
      nlohmann::json j = {{"m_mm", sol.m_sep / mm}, {"s_mm", sol.s_sep / mm}};
      std::ostringstream os;
      os << "m = " << sol.m_sep / mm << " mm, s = " << sol.s_sep / mm
         << " mm\n";
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        save_geometry(g.out_dir + "/zoom-geometry.json", sol.geometry);
        man.outputs.push_back(g.out_dir + "/zoom-geometry.json");
      }
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_focus) {
      RunManifest man = start_manifest("focus", g);
      SystemGeometry geom = geometry_from(focus_geom, man);
      const double s = autofocus_solve(geom, parse_length(focus_z0));
      nlohmann::json j = {{"s_mm", s / mm}};
      std::ostringstream os;
      os << "s = " << s / mm << " mm\n";
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        SystemGeometry focused = geom;
        focused.s_sep = s;
        save_geometry(g.out_dir + "/focused-geometry.json", focused);
        man.outputs.push_back(g.out_dir + "/focused-geometry.json");
      }
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_layout) {
      RunManifest man = start_manifest("layout", g);
      SystemGeometry geom = geometry_from(lay_geom, man);
      man.add_input(lay_lut);
      const NanocellLut lut = NanocellLut::load_csv(lay_lut);
      const double aperture = parse_length(lay_aperture);
      const auto layout =
          synthesize_layout(geom.profile, lut, aperture, g.workers);
      const auto err = realized_phase_error(layout, lut, geom.profile);
      double max_err = 0.0;
      for (double e : err) max_err = std::max(max_err, std::abs(e));
      nlohmann::json j = {{"cells_across", layout.m},
                          {"pillars", layout.pillar_count()},
                          {"max_phase_error_rad", max_err}};
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        layout.save_csv(g.out_dir + "/layout.csv");
        layout.save_binary(g.out_dir + "/layout.bin");
        io::save_pfm(g.out_dir + "/phase_error.pfm", err, layout.m, layout.m);
        man.outputs = {g.out_dir + "/layout.csv", g.out_dir + "/layout.bin",
                       g.out_dir + "/phase_error.pfm"};
      }
      std::ostringstream os;
      os << "cells across = " << layout.m
         << ", pillars = " << layout.pillar_count()
         << ", max phase error = " << max_err << " rad\n";
      emit(g, j, os.str());
      finish_manifest(man, g);
    } else if (*cmd_render) {
      RunManifest man = start_manifest("render", g);
      SystemGeometry geom = geometry_from(ren_geom, man);
      SensorModel sensor = sensor_from(ren_sensor, man);
      man.add_input(ren_scene);
      if (!ren_band_center.empty())
        sensor.band_center = parse_length(ren_band_center);
      if (!ren_band_fwhm.empty()) sensor.band_fwhm = parse_length(ren_band_fwhm);
      if (ren_gain > 0) sensor.gain = ren_gain;
      if (!ren_exposure.empty()) {
        sensor.exposure_structure = parse_time(ren_exposure);
        sensor.exposure_color = parse_time(ren_exposure);
      }
      const double depth = parse_length(ren_z0);
      SceneSpec scene = SceneSpec::from_png(ren_scene, depth,
                                            parse_length(ren_display));
      geom.s_sep = autofocus_solve(geom, depth);
      RenderOptions ropts;
      ropts.no_noise = ren_no_noise;
      ropts.shift_variant = ren_shift_variant;
      ropts.psf_n = ren_psf_n;
      ropts.workers = g.workers;
      io::ensure_directory(g.out_dir.empty() ? "." : g.out_dir);
      const std::string base = g.out_dir.empty() ? "." : g.out_dir;
      nlohmann::json j;
      if (ren_channel == "pair") {
        const auto pair = render_pair(scene, geom, sensor, g.seed, ropts);
        io::save_png16(base + "/structure.png", pair.structure.data,
                       pair.structure.width, pair.structure.height, 1);
        io::save_pfm(base + "/structure.pfm", pair.structure.data,
                     pair.structure.width, pair.structure.height, 1);
        io::save_png16(base + "/colorcue.png", pair.color_cue.data,
                       pair.color_cue.width, pair.color_cue.height, 3);
        io::save_pfm(base + "/colorcue.pfm", pair.color_cue.data,
                     pair.color_cue.width, pair.color_cue.height, 3);
        man.outputs = {base + "/structure.png", base + "/colorcue.png"};
        j["outputs"] = man.outputs;
      } else {
        const Channel ch =
            ren_channel == "structure" ? Channel::kStructure : Channel::kColor;
        const Image img =
            render_measurement(scene, geom, sensor, ch, g.seed, ropts);
        const int nch = ch == Channel::kStructure ? 1 : 3;
        io::save_png16(base + "/" + ren_channel + ".png", img.data, img.width,
                       img.height, nch);
        io::save_pfm(base + "/" + ren_channel + ".pfm", img.data, img.width,
                     img.height, nch);
        man.outputs = {base + "/" + ren_channel + ".png"};
        j["outputs"] = man.outputs;
      }
      j["s_focused_mm"] = geom.s_sep / mm;
      emit(g, j, "rendered; focused s = " + std::to_string(geom.s_sep / mm) +
                     " mm\n");
      finish_manifest(man, g);
    } else if (*cmd_ds) {
      RunManifest man = start_manifest("dataset", g);
      SystemGeometry geom = geometry_from(ds_geom, man);
      SensorModel sensor = sensor_from(ds_sensor, man);
      const double depth = parse_length(ds_z0);
      geom.s_sep = autofocus_solve(geom, depth);
      RenderOptions ropts;
      ropts.no_noise = ds_no_noise;
      ropts.psf_n = ds_psf_n;
      ropts.workers = g.workers;
      ropts.scene_depth = depth;
      ropts.scene_display_width = parse_length(ds_display);
      const std::string out = g.out_dir.empty() ? "dataset" : g.out_dir;
      const auto result =
          generate_dataset(ds_scenes, geom, sensor, ds_count, g.seed, out, ropts);
      nlohmann::json j = {{"rendered", result.rendered},
                          {"reused", result.reused},
                          {"skipped", result.skipped},
                          {"manifest", result.manifest_path}};
      std::ostringstream os;
      os << "rendered " << result.rendered << ", reused " << result.reused
         << ", skipped " << result.skipped << "\n";
      emit(g, j, os.str());
      man.outputs.push_back(result.manifest_path);
      finish_manifest(man, g);
    } else if (*cmd_rapsd) {
      RunManifest man = start_manifest("rapsd", g);
      man.add_input(rp_image);
      int w = 0, h = 0, c = 0;
      std::vector<double> img;
      if (rp_image.size() > 4 &&
          rp_image.substr(rp_image.size() - 4) == ".pfm")
        img = io::load_pfm(rp_image, w, h, c);
      else
        img = io::load_png(rp_image, w, h, c);
      std::vector<double> plane(static_cast<std::size_t>(w) * h);
      const int ch = std::min(rp_channel, c - 1);
      for (std::size_t i = 0; i < plane.size(); ++i)
        plane[i] = img[i * c + ch];
      const auto curve = rapsd(plane, w, h, parse_length(rp_pitch));
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        curve.save_csv(g.out_dir + "/rapsd.csv");
        man.outputs.push_back(g.out_dir + "/rapsd.csv");
      }
      nlohmann::json j = {{"bins", curve.mean_power.size()},
                          {"total_power", curve.total_power()}};
      emit(g, j, "rapsd bins: " + std::to_string(curve.mean_power.size()) + "\n");
      finish_manifest(man, g);
    } else if (*cmd_design) {
      RunManifest man = start_manifest("design", g);
      SystemGeometry geom = geometry_from(dsn_geom, man);
      DesignConstraints con;
      con.strehl_floor = dsn_strehl;
      con.cutoff_floor = dsn_cutoff_lpmm * 1e3;
      con.angle_max_deg = parse_angle_deg(dsn_theta);
      con.track_budget = parse_length(dsn_budget);
      con.lambda0 = geom.lambda0;
      DesignOptions dopts;
      dopts.max_iterations_per_stage = dsn_iters;
      dopts.verify_n = dsn_verify_n;
      dopts.workers = g.workers;
      const auto result = optimize_design(geom, con, dopts);
      nlohmann::json j = {{"final_ratio", result.report.final_ratio},
                          {"feasible", result.report.feasible},
                          {"iterations", result.report.iterations},
                          {"m_mm", result.geometry.m_sep / mm},
                          {"s_mm", result.geometry.s_sep / mm}};
      if (!g.out_dir.empty()) {
        io::ensure_directory(g.out_dir);
        result.report.save_json(g.out_dir + "/design-report.json");
        save_geometry(g.out_dir + "/design-geometry.json", result.geometry);
        man.outputs = {g.out_dir + "/design-report.json",
                       g.out_dir + "/design-geometry.json"};
      }
      std::ostringstream os;
      os << "ratio " << result.report.final_ratio
         << (result.report.feasible ? " (feasible)" : " (infeasible)") << "\n";
      emit(g, j, os.str());
      finish_manifest(man, g);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
