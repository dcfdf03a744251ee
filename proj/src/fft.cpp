#include "metatele/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace metatele {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

void transform(std::vector<complexd>& data, int n_rows, int n_cols, int sign) {
  if (static_cast<std::size_t>(n_rows) * n_cols != data.size())
    throw DomainError("fft2: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    // fftw_plan_dft_2d is not thread-safe; FFTW_ESTIMATE leaves the input
    // untouched and keeps run-to-run results deterministic.
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_2d(n_rows, n_cols, p, p, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
}

template <typename T>
void shift2_impl(std::vector<T>& data, int n_rows, int n_cols) {
  const int hr = n_rows / 2;
  const int hc = n_cols / 2;
  // Even sizes only (ComplexField guarantees this).
  for (int r = 0; r < hr; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      int r2 = r + hr;
      int c2 = (c + hc) % n_cols;
      std::swap(data[static_cast<std::size_t>(r) * n_cols + c],
                data[static_cast<std::size_t>(r2) * n_cols + c2]);
    }
  }
}

}  // namespace

void fft2(std::vector<complexd>& data, int n_rows, int n_cols) {
  transform(data, n_rows, n_cols, FFTW_FORWARD);
}

void ifft2(std::vector<complexd>& data, int n_rows, int n_cols) {
  transform(data, n_rows, n_cols, FFTW_BACKWARD);
}

void fftshift2(std::vector<complexd>& data, int n_rows, int n_cols) {
  shift2_impl(data, n_rows, n_cols);
}

void fftshift2(std::vector<double>& data, int n_rows, int n_cols) {
  shift2_impl(data, n_rows, n_cols);
}

double fft_freq(int i, int n, double pitch) {
  int k = (i < (n + 1) / 2) ? i : i - n;
  return k / (n * pitch);
}

}  // namespace metatele
