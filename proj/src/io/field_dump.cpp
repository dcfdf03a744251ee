#include <cstring>
#include <fstream>

#include "metatele/io.hpp"

namespace metatele {
namespace io {

void save_field(const std::string& path, const ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_field: cannot write " + path);
  const char magic[8] = {'M', 'T', 'F', 'L', 'D', '0', '1', '\0'};
  out.write(magic, 8);
  const std::uint64_t n = static_cast<std::uint64_t>(field.n());
  out.write(reinterpret_cast<const char*>(&n), 8);
  const double pitch_nm = field.pitch() / nm;
  const double wavelength_nm = field.wavelength() / nm;
  out.write(reinterpret_cast<const char*>(&pitch_nm), 8);
  out.write(reinterpret_cast<const char*>(&wavelength_nm), 8);
  // Row-major interleaved re/im doubles; std::complex<double> layout is
  // guaranteed to be {re, im}.
  out.write(reinterpret_cast<const char*>(field.data().data()),
            static_cast<std::streamsize>(field.data().size() * 16));
}

ComplexField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_field: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "MTFLD01\0", 8) != 0)
    throw IoError("load_field: bad magic in " + path);
  std::uint64_t n = 0;
  double pitch_nm = 0, wavelength_nm = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&pitch_nm), 8);
  in.read(reinterpret_cast<char*>(&wavelength_nm), 8);
  ComplexField field(static_cast<int>(n), pitch_nm * nm, wavelength_nm * nm);
  in.read(reinterpret_cast<char*>(field.data().data()),
          static_cast<std::streamsize>(field.data().size() * 16));
  if (!in) throw IoError("load_field: truncated " + path);
  return field;
}

}  // namespace io
}  // namespace metatele
