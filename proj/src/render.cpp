#include "metatele/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "metatele/fft.hpp"
#include "metatele/io.hpp"
#include "metatele/noise.hpp"
#include "metatele/parallel.hpp"
#include "metatele/psf.hpp"

namespace metatele {

void SensorModel::validate() const {
  if (!(pixel_pitch > 0) || width <= 0 || height <= 0)
    throw DomainError("SensorModel: bad pixel geometry");
  if (!(exposure_structure > 0) || !(exposure_color > 0))
    throw DomainError("SensorModel: exposures must be > 0");
  if (read_noise < 0) throw DomainError("SensorModel: negative read noise");
  if (!(quantum_efficiency > 0) || !(gain > 0))
    throw DomainError("SensorModel: qe and gain must be > 0");
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0 ||
      texture.size() != static_cast<std::size_t>(width) * height * 3)
    throw DomainError("SceneSpec: bad texture dimensions");
  if (!(depth > 0)) throw DomainError("SceneSpec: depth must be > 0");
  if (!(display_width > 0))
    throw DomainError("SceneSpec: display width must be > 0");
  for (double v : texture)
    if (v < 0) throw DomainError("SceneSpec: negative radiance");
}

SceneSpec SceneSpec::from_png(const std::string& path, double depth,
                              double display_width) {
  SceneSpec s;
  int ch = 0;
  auto img = io::load_png(path, s.width, s.height, ch);
  s.depth = depth;
  s.display_width = display_width;
  s.texture.resize(static_cast<std::size_t>(s.width) * s.height * 3);
  for (int r = 0; r < s.height; ++r)
    for (int c = 0; c < s.width; ++c)
      for (int k = 0; k < 3; ++k)
        s.texture[(static_cast<std::size_t>(r) * s.width + c) * 3 + k] =
            img[(static_cast<std::size_t>(r) * s.width + c) * ch +
                (ch == 3 ? k : 0)];
  s.validate();
  return s;
}

double SceneSpec::radiance(int row, int col, double lambda) const {
  const std::size_t i = (static_cast<std::size_t>(row) * width + col) * 3;
  return texture[i] * basis.r.at(lambda) + texture[i + 1] * basis.g.at(lambda) +
         texture[i + 2] * basis.b.at(lambda);
}

namespace {

double focused_check(const SceneSpec& scene, const SystemGeometry& geom) {
  const double delta = residual_defocus(geom, scene.depth, geom.lambda0);
  if (std::abs(delta) > 1e-3) {
    std::ostringstream os;
    os << "render: geometry is not focused at the scene depth "
       << scene.depth / mm << " mm (residual defocus " << delta
       << " 1/m); run the autofocus solver first";
    throw DomainError(os.str());
  }
  return magnification_and_efl(geom, scene.depth).gamma;
}

// Bilinear texture sample in physical display coordinates.
double sample_texture(const SceneSpec& s, double x, double y, int ch) {
  const double texel = s.display_width / s.width;
  const double height_phys = s.height * texel;
  const double uc = (x + 0.5 * s.display_width) / texel - 0.5;
  const double vr = (y + 0.5 * height_phys) / texel - 0.5;
  const int c0 = static_cast<int>(std::floor(uc));
  const int r0 = static_cast<int>(std::floor(vr));
  const double fc = uc - c0;
  const double fr = vr - r0;
  auto tex = [&](int r, int c) -> double {
    if (r < 0 || r >= s.height || c < 0 || c >= s.width) return 0.0;
    return s.texture[(static_cast<std::size_t>(r) * s.width + c) * 3 + ch];
  };
  return (1 - fr) * ((1 - fc) * tex(r0, c0) + fc * tex(r0, c0 + 1)) +
         fr * ((1 - fc) * tex(r0 + 1, c0) + fc * tex(r0 + 1, c0 + 1));
}

// Cached per-wavelength unit-sum PSF kernels.
struct KernelKey {
  std::uint64_t geom_hash;
  std::uint64_t lambda_bits;
  int n;
  bool operator<(const KernelKey& o) const {
    return std::tie(geom_hash, lambda_bits, n) <
           std::tie(o.geom_hash, o.lambda_bits, o.n);
  }
};

const std::vector<double>& kernel_for(const SystemGeometry& geom,
                                      double distance, double lambda, int n,
                                      double pitch) {
  static std::map<KernelKey, std::vector<double>> cache;
  static std::mutex mutex;
  std::uint64_t lb;
  static_assert(sizeof lb == sizeof lambda);
  std::memcpy(&lb, &lambda, sizeof lb);
  KernelKey key{geom.hash() ^ io::fnv1a_bytes(&distance, sizeof distance), lb,
                n};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  PsfOptions popts;
  popts.n = n;
  popts.pitch = pitch;
  PsfSample s = psf(geom, {distance, lambda, {}}, popts);
  double sum = 0.0;
  for (double v : s.intensity) sum += v;
  std::vector<double> k = std::move(s.intensity);
  if (sum > 0)
    for (double& v : k) v /= sum;
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key, std::move(k)).first->second;
}

}  // namespace

Image ideal_image(const SceneSpec& scene, const SystemGeometry& geom,
                  const SensorModel& sensor) {
  scene.validate();
  sensor.validate();
  const double gamma = magnification_and_efl(geom, scene.depth).gamma;
  Image out;
  out.width = sensor.width;
  out.height = sensor.height;
  out.channels = 3;
  out.data.assign(static_cast<std::size_t>(out.width) * out.height * 3, 0.0);
  for (int r = 0; r < out.height; ++r) {
    const double uy = (r - out.height / 2) * sensor.pixel_pitch;
    for (int c = 0; c < out.width; ++c) {
      const double ux = (c - out.width / 2) * sensor.pixel_pitch;
      // A scene point at x images to u = -gamma x.
      const double sx = -ux / gamma;
      const double sy = -uy / gamma;
      for (int ch = 0; ch < 3; ++ch)
        out.at(r, c, ch) = sample_texture(scene, sx, sy, ch);
    }
  }
  return out;
}

std::vector<double> spectral_convolve(
    const std::vector<std::vector<double>>& planes,
    const std::vector<std::vector<double>>& kernels,
    const std::vector<double>& weights, int width, int height, int kernel_n) {
  if (planes.size() != kernels.size() || planes.size() != weights.size())
    throw DomainError("spectral_convolve: mismatched stack sizes");
  // Linear convolution size (padded), kept even.
  int p = width + kernel_n;
  if (p % 2) ++p;
  const std::size_t psz = static_cast<std::size_t>(p) * p;

  std::vector<double> out(static_cast<std::size_t>(width) * height, 0.0);
  std::vector<complexd> a(psz), b(psz);
  for (std::size_t q = 0; q < planes.size(); ++q) {
    if (weights[q] == 0.0) continue;
    std::fill(a.begin(), a.end(), complexd{});
    std::fill(b.begin(), b.end(), complexd{});
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        a[static_cast<std::size_t>(r) * p + c] =
            planes[q][static_cast<std::size_t>(r) * width + c];
    // Kernel center sample goes to the padded origin (wrapped).
    const int kc = kernel_n / 2;
    for (int r = 0; r < kernel_n; ++r) {
      const int rr = (r - kc + p) % p;
      for (int c = 0; c < kernel_n; ++c) {
        const int cc = (c - kc + p) % p;
        b[static_cast<std::size_t>(rr) * p + cc] =
            kernels[q][static_cast<std::size_t>(r) * kernel_n + c];
      }
    }
    fft2(a, p, p);
    fft2(b, p, p);
    const double inv = 1.0 / (static_cast<double>(p) * p);
    for (std::size_t i = 0; i < psz; ++i) a[i] *= b[i] * inv;
    ifft2(a, p, p);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        out[static_cast<std::size_t>(r) * width + c] +=
            weights[q] * a[static_cast<std::size_t>(r) * p + c].real();
  }
  return out;
}

namespace {

// Hat weight for bilinear blending across a 3-point grid {-span, 0, +span}.
double hat_weight(double u, double node, double span) {
  const double t = 1.0 - std::abs(u - node) / span;
  return std::max(0.0, t);
}

// 3x3 PSF-grid interpolation: each grid kernel is recentered and the nine
// convolution stacks are blended bilinearly over the canvas.
std::vector<double> convolve_shift_variant(
    const std::vector<std::vector<double>>& planes,
    const std::vector<QuadratureNode>& nodes,
    const std::vector<double>& weights, const SceneSpec& scene,
    const SystemGeometry& geom, const SensorModel& sensor,
    const RenderOptions& opts) {
  const int w = sensor.width, h = sensor.height;
  const double gamma = magnification_and_efl(geom, scene.depth).gamma;
  const double span_x = 0.375 * w * sensor.pixel_pitch;
  const double span_y = 0.375 * h * sensor.pixel_pitch;

  std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
  for (int gy = -1; gy <= 1; ++gy) {
    for (int gx = -1; gx <= 1; ++gx) {
      const Vec2 u_g{gx * span_x, gy * span_y};
      const Vec2 x0{-u_g.x / gamma, -u_g.y / gamma};
      std::vector<std::vector<double>> kernels(nodes.size());
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        PsfOptions popts;
        popts.n = opts.psf_n;
        popts.pitch = sensor.pixel_pitch;
        PsfSample s = psf(geom, {scene.depth, nodes[q].lambda, x0}, popts);
        // Recenter the pattern: undo the -gamma*x0 translation.
        const int sr = static_cast<int>(std::lround(u_g.y / s.pitch));
        const int sc = static_cast<int>(std::lround(u_g.x / s.pitch));
        std::vector<double> k(s.intensity.size(), 0.0);
        double sum = 0.0;
        for (int r = 0; r < s.n; ++r)
          for (int c = 0; c < s.n; ++c) {
            const int r2 = r + sr, c2 = c + sc;
            if (r2 < 0 || r2 >= s.n || c2 < 0 || c2 >= s.n) continue;
            const double v = s.at(r2, c2);
            k[static_cast<std::size_t>(r) * s.n + c] = v;
            sum += v;
          }
        if (sum > 0)
          for (double& v : k) v /= sum;
        kernels[q] = std::move(k);
      }
      const auto conv =
          spectral_convolve(planes, kernels, weights, w, h, opts.psf_n);
      for (int r = 0; r < h; ++r) {
        // Clamp to the outer nodes so the nine weights always sum to one.
        const double uy = std::clamp((r - h / 2) * sensor.pixel_pitch,
                                     -span_y, span_y);
        const double wy = hat_weight(uy, u_g.y, span_y);
        if (wy == 0.0) continue;
        for (int c = 0; c < w; ++c) {
          const double ux = std::clamp((c - w / 2) * sensor.pixel_pitch,
                                       -span_x, span_x);
          const double wx = hat_weight(ux, u_g.x, span_x);
          if (wx == 0.0) continue;
          out[static_cast<std::size_t>(r) * w + c] +=
              wx * wy * conv[static_cast<std::size_t>(r) * w + c];
        }
      }
    }
  }
  return out;
}

}  // namespace

Image render_measurement(const SceneSpec& scene, const SystemGeometry& geom,
                         const SensorModel& sensor, Channel channel,
                         std::uint64_t seed, const RenderOptions& opts) {
  scene.validate();
  sensor.validate();
  focused_check(scene, geom);

  const Image ideal = ideal_image(scene, geom, sensor);
  const int w = sensor.width, h = sensor.height;
  const int out_channels = channel == Channel::kStructure ? 1 : 3;
  const double exposure = channel == Channel::kStructure
                              ? sensor.exposure_structure
                              : sensor.exposure_color;

  std::vector<QuadratureNode> nodes =
      channel == Channel::kStructure
          ? band_quadrature(sensor.band_center, sensor.band_fwhm, 5)
          : color_quadrature(31);

  // Spectral planes of the ideal image and the per-wavelength kernels.
  std::vector<std::vector<double>> planes(nodes.size());
  std::vector<std::vector<double>> kernels(nodes.size());
  parallel_for(nodes.size(), opts.workers, [&](std::size_t q) {
    const double lam = nodes[q].lambda;
    std::vector<double> plane(static_cast<std::size_t>(w) * h);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        plane[i] = ideal.at(r, c, 0) * scene.basis.r.at(lam) +
                   ideal.at(r, c, 1) * scene.basis.g.at(lam) +
                   ideal.at(r, c, 2) * scene.basis.b.at(lam);
      }
    planes[q] = std::move(plane);
    kernels[q] = kernel_for(geom, scene.depth, lam, opts.psf_n,
                            sensor.pixel_pitch);
  });

  Image out;
  out.width = w;
  out.height = h;
  out.channels = out_channels;
  out.data.assign(static_cast<std::size_t>(w) * h * out_channels, 0.0);

  for (int ch = 0; ch < out_channels; ++ch) {
    std::vector<double> weights(nodes.size());
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double lam = nodes[q].lambda;
      const double resp = channel == Channel::kStructure
                              ? sensor.response.g.at(lam)
                              : sensor.response.channel(ch, lam);
      weights[q] = nodes[q].weight * resp;
    }
    const auto pre =
        opts.shift_variant
            ? convolve_shift_variant(planes, nodes, weights, scene, geom,
                                     sensor, opts)
            : spectral_convolve(planes, kernels, weights, w, h, opts.psf_n);
    const double photons_per_unit =
        sensor.quantum_efficiency * exposure * sensor.radiance_scale;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        const double electrons = std::max(0.0, pre[i] * photons_per_unit);
        double dn;
        if (opts.no_noise) {
          dn = sensor.gain * electrons;
        } else {
          PixelRng rng(seed, opts.image_index,
                       (static_cast<std::uint64_t>(i) << 2) | ch);
          const double shot =
              static_cast<double>(rng.next_poisson(electrons));
          dn = sensor.gain * shot +
               sensor.gain * sensor.read_noise * rng.next_gaussian();
        }
        out.at(r, c, ch) = std::max(0.0, dn);
      }
  }
  return out;
}

MeasurementPair render_pair(const SceneSpec& scene, const SystemGeometry& geom,
                            const SensorModel& sensor, std::uint64_t seed,
                            const RenderOptions& opts) {
  MeasurementPair pair;
  RenderOptions o = opts;
  o.image_index = 2 * opts.image_index;
  pair.structure =
      render_measurement(scene, geom, sensor, Channel::kStructure, seed, o);
  o.image_index = 2 * opts.image_index + 1;
  pair.color_cue =
      render_measurement(scene, geom, sensor, Channel::kColor, seed, o);
  pair.seed = seed;
  pair.geometry_hash = geom.hash();
  pair.exposure_structure = sensor.exposure_structure;
  pair.exposure_color = sensor.exposure_color;
  return pair;
}

DatasetResult generate_dataset(const std::string& scene_dir,
                               const SystemGeometry& geom,
                               const SensorModel& sensor, int count,
                               std::uint64_t seed, const std::string& out_dir,
                               const RenderOptions& opts) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  try {
    for (const auto& e : fs::directory_iterator(scene_dir)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      if (ext == ".png" || ext == ".PNG" || ext == ".pfm")
        files.push_back(e.path().string());
    }
  } catch (const fs::filesystem_error& err) {
    throw IoError(std::string("generate_dataset: ") + err.what());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw IoError("generate_dataset: no scene images in " + scene_dir);
  io::ensure_directory(out_dir);

  nlohmann::json manifest;
  manifest["seed"] = seed;
  manifest["geometry_hash"] = io::hex64(geom.hash());
  manifest["count"] = count;
  manifest["items"] = nlohmann::json::array();

  DatasetResult result;
  std::vector<nlohmann::json> items(count);
  std::mutex io_mutex;

  parallel_for(count, opts.workers, [&](std::size_t i) {
    const std::string& scene_path = files[i % files.size()];
    char tag[32];
    std::snprintf(tag, sizeof tag, "%04zu", i);
    const std::string is_path = out_dir + "/structure_" + tag + ".png";
    const std::string ic_path = out_dir + "/colorcue_" + tag + ".png";
    const std::string gt_path = out_dir + "/groundtruth_" + tag + ".png";

    nlohmann::json item;
    item["index"] = i;
    item["scene"] = scene_path;
    try {
      item["scene_hash"] = io::hex64(io::hash_file(scene_path));
      if (io::file_exists(is_path) && io::file_exists(ic_path) &&
          io::file_exists(gt_path)) {
        item["status"] = "existing";
      } else {
        SceneSpec scene = SceneSpec::from_png(scene_path, opts.scene_depth,
                                              opts.scene_display_width);
        RenderOptions o = opts;
        o.image_index = i;
        o.workers = 1;  // parallelism lives at the item level
        const MeasurementPair pair = render_pair(scene, geom, sensor, seed, o);
        const Image gt = ideal_image(scene, geom, sensor);
        {
          std::lock_guard<std::mutex> lock(io_mutex);
          io::save_png16(is_path, pair.structure.data, pair.structure.width,
                         pair.structure.height, 1);
          io::save_png16(ic_path, pair.color_cue.data, pair.color_cue.width,
                         pair.color_cue.height, 3);
          io::save_png16(gt_path, gt.data, gt.width, gt.height, 3);
        }
        item["status"] = "rendered";
      }
      item["outputs"] = {is_path, ic_path, gt_path};
      item["output_hashes"] = {io::hex64(io::hash_file(is_path)),
                               io::hex64(io::hash_file(ic_path)),
                               io::hex64(io::hash_file(gt_path))};
    } catch (const Error& err) {
      item["status"] = "skipped";
      item["error"] = err.what();
    }
    items[i] = std::move(item);
  });

  for (auto& item : items) {
    const std::string status = item["status"];
    if (status == "rendered") ++result.rendered;
    else if (status == "existing") ++result.reused;
    else ++result.skipped;
    manifest["items"].push_back(std::move(item));
  }
  result.manifest_path = out_dir + "/manifest.json";
  std::ofstream out(result.manifest_path);
  out << manifest.dump(2) << "\n";
  return result;
}

}  // namespace metatele
