#include <filesystem>
#include <fstream>
#include <sstream>

#include "metatele/io.hpp"

namespace metatele {
namespace io {

std::uint64_t fnv1a_bytes(const void* data, std::size_t len,
                          std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("hash_file: cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a_bytes(buf, static_cast<std::size_t>(in.gcount()), h);
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << value;
  return os.str();
}

bool file_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

void ensure_directory(const std::string& path) {
  std::filesystem::create_directories(path);
}

}  // namespace io
}  // namespace metatele
