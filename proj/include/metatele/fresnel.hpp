#pragma once

#include "metatele/complex_field.hpp"

namespace metatele {

enum class FresnelMethod {
  kAuto,             // select by sampling criterion (logged)
  kTransferFunction, // angular spectrum of the Fresnel kernel
  kImpulseResponse,  // chirp multiplication + FFT (circular convolution)
};

struct FresnelOptions {
  FresnelMethod method = FresnelMethod::kAuto;
  // Zero-pad to 2N before propagating and crop back afterwards. Disable
  // only for diagnostics (e.g. exact Parseval checks on the raw transform).
  bool pad = true;
};

// Name of the method the auto selector would pick for these parameters.
// Transfer function when pitch^2 >= lambda*z/N, impulse response otherwise.
FresnelMethod select_fresnel_method(double pitch, double wavelength, double z,
                                    int n);

// Free-space propagation by axial distance z >= 0. The e^{jkz}/(j lambda z)
// prefactor is retained so absolute power bookkeeping stays exact.
// z == 0 returns the input unchanged.
// Throws SamplingError when a forced method violates its criterion,
// DomainError for z < 0.
ComplexField fresnel_propagate(const ComplexField& field, double z,
                               FresnelOptions opts = {});

// Single-FFT Fresnel transform with output pitch lambda*z/(N*pitch_in).
// This is an exact DFT quadrature of the propagation integral, so the
// combined chirp exp(jk s^2/(2z)) times the input must be resolved by the
// input grid; the caller chooses windows accordingly. Used by the PSF
// synthesis chain, where the chirp cancels most of the beam curvature.
ComplexField fresnel_propagate_scaled(const ComplexField& field, double z);

}  // namespace metatele
