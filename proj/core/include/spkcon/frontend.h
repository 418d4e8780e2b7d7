// core/include/spkcon/frontend.h

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

#ifndef SPKCON_FRONTEND_H_
#define SPKCON_FRONTEND_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spkcon/rng.h"
#include "spkcon/wav.h"

namespace spkcon {

// Row-major [num_frames x num_coeffs] feature matrix.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  float &at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  float at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
};

struct FrontendConfig {
  int sample_rate = 16000;
  int win_samples = 400;  // 25 ms
  int hop_samples = 160;  // 10 ms
  int fft_size = 512;
  int num_mel = 30;
  int num_ceps = 30;  // includes c0
  double mel_low_hz = 20.0;
  double mel_high_hz = 7600.0;
  double preemphasis = 0.97;
  // VAD: a frame is kept iff its log-energy exceeds the utterance mean
  // log-energy plus vad_offset AND its per-sample mean power exceeds
  // vad_power_floor. The relative rule alone keeps everything on constant
  // near-silence (e.g. dithered digital silence), so the absolute floor
  // makes such utterances fail as unusable.
  double vad_offset = -4.0;
  double vad_power_floor = 1e-6;
  int chunk_min_frames = 200;
  int chunk_max_frames = 400;
};

// floor((n - win) / hop) + 1, or 0 when n < win.
int NumFrames(int64_t num_samples, const FrontendConfig &cfg);

// Per-frame keep mask (25 ms / 10 ms geometry). Throws FrontendError when no
// frame survives (utterance unusable) or the waveform is shorter than one
// window.
std::vector<uint8_t> EnergyVad(const Waveform &w, const FrontendConfig &cfg);

// MFCC extractor with precomputed window/filterbank/DCT tables and a reused
// FFT plan. Deterministic: identical waveforms give identical matrices.
class MfccComputer {
 public:
  explicit MfccComputer(const FrontendConfig &cfg);
  ~MfccComputer();
  MfccComputer(const MfccComputer &) = delete;
  MfccComputer &operator=(const MfccComputer &) = delete;

  const FrontendConfig &config() const { return cfg_; }

  // [T x num_ceps]; per frame: pre-emphasis, Hamming window, FFT power
  // spectrum, mel filterbank (mel_low..mel_high), log, orthonormal DCT-II
  // keeping num_ceps coefficients (c0 first). Throws FrontendError when the
  // input is shorter than one window.
  FeatureMatrix Compute(const Waveform &w);

  // Compute() restricted to rows where keep[t] != 0.
  FeatureMatrix ComputeMasked(const Waveform &w,
                              const std::vector<uint8_t> &keep);

 private:
  struct Impl;
  FrontendConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

// Subtracts the per-coefficient mean over the matrix rows (cepstral mean
// normalization). After this every |column mean| < 1e-4.
void MeanNormalize(FeatureMatrix *m);

// Contiguous random window of length uniform in [chunk_min, chunk_max]
// (clipped to the available rows), mean-normalized. Returns nullopt when the
// utterance has fewer than chunk_min rows (skip-utterance signal).
std::optional<FeatureMatrix> SampleChunk(const FeatureMatrix &features,
                                         const FrontendConfig &cfg, Rng *rng);

// One dataset utterance: `utterance_id<TAB>speaker_or_-<TAB>wav_path`.
struct ManifestEntry {
  std::string utt;
  std::string spk;  // "-" means unlabeled
  std::string path;

  bool labeled() const { return spk != "-"; }
};

// Throws IngestError on unreadable files or malformed lines. Blank lines and
// lines starting with '#' are ignored.
std::vector<ManifestEntry> LoadManifest(const std::string &path);

}  // namespace spkcon

#endif  // SPKCON_FRONTEND_H_
