#include "metatele/config.hpp"

#include <fstream>

#include "json.hpp"
#include "metatele/io.hpp"

namespace metatele {

namespace {

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config: bad JSON in " + path + ": " + e.what());
  }
  return j;
}

PhaseProfile profile_from_json(const nlohmann::json& j, double lambda0) {
  const std::string kind = j.at("kind");
  if (kind == "polynomial") {
    std::array<double, 7> c{};
    const auto& arr = j.at("coeffs_mm");
    for (std::size_t i = 0; i < 7 && i < arr.size(); ++i) c[i] = arr[i];
    return PhaseProfile::polynomial(c, lambda0);
  }
  const double f = j.at("f_mm").get<double>() * mm;
  if (kind == "quadratic") return PhaseProfile::quadratic(f, lambda0);
  if (kind == "hyperbolic") return PhaseProfile::hyperbolic(f, lambda0);
  if (kind == "spherical") return PhaseProfile::spherical(f, lambda0);
  if (kind == "lens-surface")
    return PhaseProfile::lens_surface(f, j.value("n_index", 1.5), lambda0);
  throw IoError("config: unknown profile kind \"" + kind + "\"");
}

nlohmann::json profile_to_json(const PhaseProfile& p) {
  nlohmann::json j;
  j["kind"] = p.kind_name();
  if (p.kind == ProfileKind::kPolynomial) {
    j["coeffs_mm"] = p.coeffs;
  } else {
    j["f_mm"] = p.focal / mm;
    if (p.kind == ProfileKind::kLensSurface) j["n_index"] = p.lens_index;
  }
  return j;
}

}  // namespace

SystemGeometry load_geometry(const std::string& path) {
  const auto j = read_json(path);
  SystemGeometry g;
  g.f1 = j.at("f1_mm").get<double>() * mm;
  g.objective_aperture = j.at("objective_aperture_mm").get<double>() * mm;
  g.m_sep = j.at("m_mm").get<double>() * mm;
  g.s_sep = j.at("s_mm").get<double>() * mm;
  g.lambda0 = j.at("lambda0_nm").get<double>() * nm;
  g.eyepiece_mask.diameter = j.at("stop_mm").get<double>() * mm;
  g.sensor_pitch = j.value("sensor_pitch_um", 2.0) * um;
  g.profile = profile_from_json(j.at("profile"), g.lambda0);
  if (j.contains("lens_model")) {
    LensModel lm;
    lm.n_index = j["lens_model"].at("n_index");
    lm.surface_radius = j["lens_model"].at("surface_radius_mm").get<double>() * mm;
    g.lens_model = lm;
  }
  g.validate();
  return g;
}

void save_geometry(const std::string& path, const SystemGeometry& g) {
  nlohmann::json j;
  j["f1_mm"] = g.f1 / mm;
  j["objective_aperture_mm"] = g.objective_aperture / mm;
  j["m_mm"] = g.m_sep / mm;
  j["s_mm"] = g.s_sep / mm;
  j["lambda0_nm"] = g.lambda0 / nm;
  j["stop_mm"] = g.eyepiece_mask.diameter / mm;
  j["sensor_pitch_um"] = g.sensor_pitch / um;
  j["profile"] = profile_to_json(g.profile);
  if (g.lens_model) {
    j["lens_model"] = {{"n_index", g.lens_model->n_index},
                       {"surface_radius_mm", g.lens_model->surface_radius / mm}};
  }
  std::ofstream out(path);
  if (!out) throw IoError("save_geometry: cannot write " + path);
  out << j.dump(2) << "\n";
}

SensorModel load_sensor(const std::string& path) {
  const auto j = read_json(path);
  SensorModel s;
  s.pixel_pitch = j.value("pixel_pitch_um", 2.0) * um;
  s.width = j.value("width", 512);
  s.height = j.value("height", 512);
  s.quantum_efficiency = j.value("quantum_efficiency", 0.6);
  s.gain = j.value("gain_dn_per_e", 1.0);
  s.read_noise = j.value("read_noise_e", 2.0);
  s.exposure_structure = j.value("exposure_structure_s", 1.0);
  s.exposure_color = j.value("exposure_color_s", 0.1);
  s.band_center = j.value("band_center_nm", 532.0) * nm;
  s.band_fwhm = j.value("band_fwhm_nm", 10.0) * nm;
  s.radiance_scale = j.value("radiance_scale", 2.0e13);
  if (j.contains("response_dir") && j.contains("response_stem"))
    s.response = RgbSpectra::load(j["response_dir"], j["response_stem"]);
  s.validate();
  return s;
}

void save_sensor(const std::string& path, const SensorModel& s) {
  nlohmann::json j;
  j["pixel_pitch_um"] = s.pixel_pitch / um;
  j["width"] = s.width;
  j["height"] = s.height;
  j["quantum_efficiency"] = s.quantum_efficiency;
  j["gain_dn_per_e"] = s.gain;
  j["read_noise_e"] = s.read_noise;
  j["exposure_structure_s"] = s.exposure_structure;
  j["exposure_color_s"] = s.exposure_color;
  j["band_center_nm"] = s.band_center / nm;
  j["band_fwhm_nm"] = s.band_fwhm / nm;
  j["radiance_scale"] = s.radiance_scale;
  std::ofstream out(path);
  if (!out) throw IoError("save_sensor: cannot write " + path);
  out << j.dump(2) << "\n";
}

SystemGeometry production_geometry() {
  // Separations solve EFL = s f1 / (f1 - m) = 30 mm together with
  // TTL = m + s = 13.2 mm for f1 = 7.5 mm: m = 5.6 mm, s = 7.6 mm.
  SystemGeometry g;
  g.f1 = 7.5 * mm;
  g.objective_aperture = 5.0 * mm;
  g.m_sep = 5.6 * mm;
  g.s_sep = 7.6 * mm;
  g.lambda0 = 532 * nm;
  g.eyepiece_mask.diameter = 0.8 * mm;
  g.sensor_pitch = 2.0 * um;
  g.profile = PhaseProfile::quadratic(-2 * mm, g.lambda0);
  return g;
}

std::array<double, 7> production_polynomial_coeffs() {
  return {0.25, -0.0156, 0.2133, -0.6931, -1.5622, -0.0633, 10.8101};
}

SystemGeometry production_geometry_polynomial() {
  SystemGeometry g = production_geometry();
  g.profile =
      PhaseProfile::polynomial(production_polynomial_coeffs(), g.lambda0);
  return g;
}

}  // namespace metatele
