#include <cstring>
#include <fstream>
#include <sstream>

#include "metatele/io.hpp"

namespace metatele {
namespace io {

void save_pfm(const std::string& path, const std::vector<double>& img,
              int width, int height, int channels) {
  if (channels != 1 && channels != 3)
    throw IoError("save_pfm: channels must be 1 or 3");
  if (img.size() != static_cast<std::size_t>(width) * height * channels)
    throw IoError("save_pfm: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_pfm: cannot write " + path);
  out << (channels == 1 ? "Pf" : "PF") << "\n"
      << width << " " << height << "\n-1.0\n";
  // PFM stores rows bottom-up.
  std::vector<float> row(static_cast<std::size_t>(width) * channels);
  for (int r = height - 1; r >= 0; --r) {
    const double* src =
        img.data() + static_cast<std::size_t>(r) * width * channels;
    for (std::size_t i = 0; i < row.size(); ++i)
      row[i] = static_cast<float>(src[i]);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

std::vector<double> load_pfm(const std::string& path, int& width, int& height,
                             int& channels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_pfm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic == "Pf")
    channels = 1;
  else if (magic == "PF")
    channels = 3;
  else
    throw IoError("load_pfm: bad magic in " + path);
  double scale;
  in >> width >> height >> scale;
  in.get();  // single whitespace after the scale line
  if (width <= 0 || height <= 0 || std::abs(scale) == 0)
    throw IoError("load_pfm: bad header in " + path);
  if (scale > 0)
    throw IoError("load_pfm: big-endian PFM not supported: " + path);
  std::vector<double> img(static_cast<std::size_t>(width) * height * channels);
  std::vector<float> row(static_cast<std::size_t>(width) * channels);
  for (int r = height - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("load_pfm: truncated " + path);
    double* dst = img.data() + static_cast<std::size_t>(r) * width * channels;
    for (std::size_t i = 0; i < row.size(); ++i) dst[i] = row[i];
  }
  return img;
}

}  // namespace io
}  // namespace metatele
