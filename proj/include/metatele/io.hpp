#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metatele/complex_field.hpp"

namespace metatele {
namespace io {

// --- PFM (portable float map), little-endian, scale -1 ---------------------
// Grayscale "Pf" for single-channel data, "PF" for packed RGB.
void save_pfm(const std::string& path, const std::vector<double>& img,
              int width, int height, int channels = 1);
std::vector<double> load_pfm(const std::string& path, int& width, int& height,
                             int& channels);

// --- PNG --------------------------------------------------------------------
// 16-bit normalized export; the scale that maps DN back to the linear data
// goes into a JSON sidecar (path + ".json"). Values are treated as linear.
void save_png16(const std::string& path, const std::vector<double>& img,
                int width, int height, int channels = 1,
                bool write_sidecar = true);
// Reads 8/16-bit gray or RGB(A) PNG into linear [0,1] doubles.
std::vector<double> load_png(const std::string& path, int& width, int& height,
                             int& channels);

// --- Complex field dump -----------------------------------------------------
// 32-byte header: magic "MTFLD01\0", u64 N, f64 pitch_nm, f64 wavelength_nm,
// then row-major interleaved re/im doubles.
void save_field(const std::string& path, const ComplexField& field);
ComplexField load_field(const std::string& path);

// --- Hashing / misc ---------------------------------------------------------
std::uint64_t fnv1a_bytes(const void* data, std::size_t len,
                          std::uint64_t seed = 1469598103934665603ULL);
std::uint64_t hash_file(const std::string& path);
std::string hex64(std::uint64_t value);

bool file_exists(const std::string& path);
void ensure_directory(const std::string& path);

}  // namespace io
}  // namespace metatele
