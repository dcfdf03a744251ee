#include <png.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "metatele/io.hpp"

namespace metatele {
namespace io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void save_png16(const std::string& path, const std::vector<double>& img,
                int width, int height, int channels, bool write_sidecar) {
  if (channels != 1 && channels != 3)
    throw IoError("save_png16: channels must be 1 or 3");
  if (img.size() != static_cast<std::size_t>(width) * height * channels)
    throw IoError("save_png16: size mismatch");

  double vmax = 0.0;
  for (double v : img) vmax = std::max(vmax, v);
  const double scale = vmax > 0 ? 65535.0 / vmax : 1.0;

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("save_png16: cannot write " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("save_png16: libpng failure on " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 16,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_set_swap(png);  // little-endian host to PNG big-endian

  std::vector<std::uint16_t> row(static_cast<std::size_t>(width) * channels);
  for (int r = 0; r < height; ++r) {
    const double* src =
        img.data() + static_cast<std::size_t>(r) * width * channels;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double v = std::clamp(src[i] * scale, 0.0, 65535.0);
      row[i] = static_cast<std::uint16_t>(std::lround(v));
    }
    png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  if (write_sidecar) {
    std::ofstream side(path + ".json");
    side.precision(12);
    side << "{ \"linear_max\": " << vmax << ", \"dn_per_unit\": " << scale
         << ", \"bit_depth\": 16 }\n";
  }
}

std::vector<double> load_png(const std::string& path, int& width, int& height,
                             int& channels) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("load_png: cannot open " + path);
  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 ||
      png_sig_cmp(header, 0, 8) != 0)
    throw IoError("load_png: not a PNG file: " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_png: libpng failure on " + path);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  const int out_channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  channels = out_channels >= 3 ? 3 : 1;

  std::vector<double> img(static_cast<std::size_t>(width) * height * channels);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> row(rowbytes);
  const double norm = out_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (int r = 0; r < height; ++r) {
    png_read_row(png, row.data(), nullptr);
    for (int c = 0; c < width; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        double v;
        if (out_depth == 16) {
          const auto* p16 = reinterpret_cast<const std::uint16_t*>(row.data());
          v = p16[c * out_channels + ch] * norm;
        } else {
          v = row[c * out_channels + ch] * norm;
        }
        img[(static_cast<std::size_t>(r) * width + c) * channels + ch] = v;
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace io
}  // namespace metatele
