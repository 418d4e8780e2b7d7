// core/include/spkcon/dsp.h

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

#ifndef SPKCON_DSP_H_
#define SPKCON_DSP_H_

#include <complex>
#include <memory>
#include <vector>

namespace spkcon {

// Real-to-complex FFT of a fixed size, wrapping a reusable plan. Plans are
// created with deterministic (non-measuring) heuristics so identical inputs
// always give identical outputs. Not thread-safe; use one per thread.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  int size() const { return n_; }

  // in: n reals. Returns n/2+1 spectrum values.
  void Forward(const double *in, std::complex<double> *out);
  // in: n/2+1 spectrum values. out: n reals, normalized by 1/n (so
  // Inverse(Forward(x)) == x).
  void Inverse(const std::complex<double> *in, double *out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// Full linear convolution (length |x| + |h| - 1) computed via FFT in double
// precision. Either input empty -> empty result.
std::vector<float> FftConvolve(const std::vector<float> &x,
                               const std::vector<float> &h);

}  // namespace spkcon

#endif  // SPKCON_DSP_H_
