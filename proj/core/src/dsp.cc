// core/src/dsp.cc

// Copyright 2026  spkcon authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "spkcon/dsp.h"

#include <fftw3.h>

#include <cstring>

#include "spkcon/common.h"

namespace spkcon {

struct RealFft::Impl {
  double *real = nullptr;
  fftw_complex *cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

RealFft::RealFft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2) throw ContractError("RealFft size must be >= 2");
  impl_->real = fftw_alloc_real(n);
  impl_->cplx = fftw_alloc_complex(n / 2 + 1);
  // FFTW_ESTIMATE picks the plan analytically (no timing runs), which keeps
  // results bit-reproducible across processes.
  impl_->fwd =
      fftw_plan_dft_r2c_1d(n, impl_->real, impl_->cplx, FFTW_ESTIMATE);
  impl_->inv =
      fftw_plan_dft_c2r_1d(n, impl_->cplx, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->cplx);
}

void RealFft::Forward(const double *in, std::complex<double> *out) {
  std::memcpy(impl_->real, in, sizeof(double) * n_);
  fftw_execute(impl_->fwd);
  for (int i = 0; i <= n_ / 2; ++i)
    out[i] = {impl_->cplx[i][0], impl_->cplx[i][1]};
}

void RealFft::Inverse(const std::complex<double> *in, double *out) {
  for (int i = 0; i <= n_ / 2; ++i) {
    impl_->cplx[i][0] = in[i].real();
    impl_->cplx[i][1] = in[i].imag();
  }
  fftw_execute(impl_->inv);
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = impl_->real[i] * scale;
}

std::vector<float> FftConvolve(const std::vector<float> &x,
                               const std::vector<float> &h) {
  if (x.empty() || h.empty()) return {};
  const size_t out_len = x.size() + h.size() - 1;
  size_t n = 2;
  while (n < out_len) n <<= 1;

  RealFft fft(static_cast<int>(n));
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (size_t i = 0; i < h.size(); ++i) b[i] = h[i];
  std::vector<std::complex<double>> fa(n / 2 + 1), fb(n / 2 + 1);
  fft.Forward(a.data(), fa.data());
  fft.Forward(b.data(), fb.data());
  for (size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
  std::vector<double> y(n);
  fft.Inverse(fa.data(), y.data());

  std::vector<float> out(out_len);
  for (size_t i = 0; i < out_len; ++i) out[i] = static_cast<float>(y[i]);
  return out;
}

}  // namespace spkcon
