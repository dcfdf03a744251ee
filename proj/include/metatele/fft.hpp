#pragma once

#include <vector>

#include "metatele/common.hpp"

namespace metatele {

// Thin wrapper over FFTW double-precision complex 2-D transforms.
// Forward uses the e^{-i2pi jk/N} kernel; inverse is unnormalized, so
// ifft2(fft2(x)) == N^2 * x. Callers handle scaling.
// All entry points are thread-safe (planning is serialized internally).
void fft2(std::vector<complexd>& data, int n_rows, int n_cols);
void ifft2(std::vector<complexd>& data, int n_rows, int n_cols);

// Swap quadrants so the DC sample moves between corner and center.
// For even sizes fftshift and ifftshift coincide.
void fftshift2(std::vector<complexd>& data, int n_rows, int n_cols);
void fftshift2(std::vector<double>& data, int n_rows, int n_cols);

// FFT frequency for bin i of an n-point transform at sample pitch `pitch`
// (cycles per meter), with the usual wraparound ordering.
double fft_freq(int i, int n, double pitch);

}  // namespace metatele
