#include "metatele/fresnel.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "metatele/fft.hpp"

namespace metatele {

namespace {

bool log_enabled() {
  static const bool on = std::getenv("METATELE_LOG") != nullptr;
  return on;
}

void log_method(const char* name, double pitch, double wavelength, double z,
                int n) {
  if (!log_enabled()) return;
  std::clog << "[fresnel] method=" << name << " z=" << z / mm
            << "mm pitch=" << pitch / um << "um n=" << n
            << " lambda=" << wavelength / nm << "nm crit=" << pitch * pitch
            << (pitch * pitch >= wavelength * z / n ? " >= " : " < ")
            << wavelength * z / n << "\n";
}

// Embed centered into a 2N x 2N zero field.
std::vector<complexd> pad2(const std::vector<complexd>& in, int n) {
  const int m = 2 * n;
  std::vector<complexd> out(static_cast<std::size_t>(m) * m, complexd{});
  const int off = n / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out[static_cast<std::size_t>(r + off) * m + (c + off)] =
          in[static_cast<std::size_t>(r) * n + c];
  return out;
}

std::vector<complexd> crop2(const std::vector<complexd>& in, int n) {
  const int m = 2 * n;
  std::vector<complexd> out(static_cast<std::size_t>(n) * n);
  const int off = n / 2;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out[static_cast<std::size_t>(r) * n + c] =
          in[static_cast<std::size_t>(r + off) * m + (c + off)];
  return out;
}

// Transfer-function propagation on an m x m grid, in place.
// H(f) = e^{jkz} exp(-j pi lambda z |f|^2): the exact continuous Fourier
// transform of the Fresnel kernel including its prefactor.
void propagate_tf(std::vector<complexd>& data, int m, double pitch,
                  double wavelength, double z) {
  fft2(data, m, m);
  const double k = wavenumber(wavelength);
  const complexd global = std::exp(complexd(0.0, k * z));
  for (int r = 0; r < m; ++r) {
    const double fy = fft_freq(r, m, pitch);
    for (int c = 0; c < m; ++c) {
      const double fx = fft_freq(c, m, pitch);
      const double phase = -kPi * wavelength * z * (fx * fx + fy * fy);
      data[static_cast<std::size_t>(r) * m + c] *=
          global * std::exp(complexd(0.0, phase)) / double(m) / double(m);
    }
  }
  ifft2(data, m, m);
}

// Impulse-response propagation: circular convolution with the sampled
// Fresnel kernel. With the 2N padding this equals the direct quadrature of
// the propagation integral exactly for outputs inside the original window.
void propagate_ir(std::vector<complexd>& data, int m, double pitch,
                  double wavelength, double z) {
  const double k = wavenumber(wavelength);
  const complexd pref =
      std::exp(complexd(0.0, k * z)) / complexd(0.0, wavelength * z) * pitch *
      pitch;
  std::vector<complexd> ker(static_cast<std::size_t>(m) * m);
  for (int r = 0; r < m; ++r) {
    const int dr = (r < (m + 1) / 2) ? r : r - m;
    for (int c = 0; c < m; ++c) {
      const int dc = (c < (m + 1) / 2) ? c : c - m;
      const double r2 = (dr * pitch) * (dr * pitch) + (dc * pitch) * (dc * pitch);
      ker[static_cast<std::size_t>(r) * m + c] =
          pref * std::exp(complexd(0.0, k / (2.0 * z) * r2));
    }
  }
  fft2(data, m, m);
  fft2(ker, m, m);
  const double inv = 1.0 / (double(m) * double(m));
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= ker[i] * inv;
  ifft2(data, m, m);
}

}  // namespace

FresnelMethod select_fresnel_method(double pitch, double wavelength, double z,
                                    int n) {
  return (pitch * pitch >= wavelength * z / n)
             ? FresnelMethod::kTransferFunction
             : FresnelMethod::kImpulseResponse;
}

ComplexField fresnel_propagate(const ComplexField& field, double z,
                               FresnelOptions opts) {
  if (z < 0.0) throw DomainError("fresnel_propagate: z must be >= 0");
  if (z == 0.0) return field;

  const int n = field.n();
  const double pitch = field.pitch();
  const double wl = field.wavelength();

  FresnelMethod method = opts.method;
  if (method == FresnelMethod::kAuto) {
    method = select_fresnel_method(pitch, wl, z, n);
  } else {
    const double crit = wl * z / n;
    if (method == FresnelMethod::kTransferFunction && pitch * pitch < crit) {
      const int min_n = static_cast<int>(std::ceil(wl * z / (pitch * pitch)));
      std::ostringstream os;
      os << "fresnel_propagate: transfer-function criterion pitch^2 >= "
            "lambda*z/N violated (pitch^2="
         << pitch * pitch << ", lambda*z/N=" << crit
         << "); minimum N=" << min_n << " at this pitch";
      throw SamplingError(os.str(), min_n);
    }
    if (method == FresnelMethod::kImpulseResponse && pitch * pitch > crit) {
      const int max_n = static_cast<int>(std::floor(wl * z / (pitch * pitch)));
      std::ostringstream os;
      os << "fresnel_propagate: impulse-response criterion pitch^2 <= "
            "lambda*z/N violated (pitch^2="
         << pitch * pitch << ", lambda*z/N=" << crit
         << "); N <= " << max_n
         << " at this pitch, or use the transfer-function method";
      throw SamplingError(os.str(), max_n > 0 ? max_n : 1);
    }
  }

  const int m = opts.pad ? 2 * n : n;
  std::vector<complexd> work =
      opts.pad ? pad2(field.data(), n) : field.data();

  if (method == FresnelMethod::kTransferFunction) {
    log_method("transfer-function", pitch, wl, z, n);
    propagate_tf(work, m, pitch, wl, z);
  } else {
    log_method("impulse-response", pitch, wl, z, n);
    propagate_ir(work, m, pitch, wl, z);
  }

  ComplexField out(n, pitch, wl, field.origin());
  out.data() = opts.pad ? crop2(work, n) : std::move(work);
  return out;
}

ComplexField fresnel_propagate_scaled(const ComplexField& field, double z) {
  if (!(z > 0.0)) throw DomainError("fresnel_propagate_scaled: z must be > 0");
  const int n = field.n();
  const double pin = field.pitch();
  const double wl = field.wavelength();
  const double k = wavenumber(wl);
  const double pout = wl * z / (n * pin);

  // U_out(x_j) = pref * e^{jk x^2/(2z)} * sum_k U(s_k) e^{jk s^2/(2z)}
  //              * e^{-2pi i (j-N/2)(k-N/2)/N} * pitch^2, exactly a DFT with
  // (-1)^k pre/post factors for the centered index offsets.
  std::vector<complexd> work(field.data());
  for (int r = 0; r < n; ++r) {
    const double y = field.coord(r);
    for (int c = 0; c < n; ++c) {
      const double x = field.coord(c);
      const double chirp = k / (2.0 * z) * (x * x + y * y);
      double sgn = ((r + c) & 1) ? -1.0 : 1.0;
      work[static_cast<std::size_t>(r) * n + c] *=
          sgn * std::exp(complexd(0.0, chirp));
    }
  }
  fft2(work, n, n);

  const complexd pref =
      std::exp(complexd(0.0, k * z)) / complexd(0.0, wl * z) * pin * pin;
  // The centered-index cross term leaves e^{-i pi N/2} per axis; the two
  // axes square it away for any even N, so only the (-1)^{j} factors remain.
  ComplexField out(n, pout, wl, field.origin());
  for (int r = 0; r < n; ++r) {
    const double y = out.coord(r);
    for (int c = 0; c < n; ++c) {
      const double x = out.coord(c);
      const double chirp = k / (2.0 * z) * (x * x + y * y);
      double sgn = ((r + c) & 1) ? -1.0 : 1.0;
      out.at(r, c) = pref * sgn * std::exp(complexd(0.0, chirp)) *
                     work[static_cast<std::size_t>(r) * n + c];
    }
  }
  return out;
}

}  // namespace metatele
