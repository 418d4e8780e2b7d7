// core/include/spkcon/augment.h

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

#ifndef SPKCON_AUGMENT_H_
#define SPKCON_AUGMENT_H_

#include <string>
#include <utility>
#include <vector>

#include "spkcon/frontend.h"
#include "spkcon/rng.h"
#include "spkcon/wav.h"

namespace spkcon {

// Noise classes for the additive stage.
enum class NoiseClass { kNoise = 0, kMusic = 1, kBabble = 2 };

struct AugmentCorpus {
  std::vector<Waveform> rirs;
  std::vector<Waveform> noise;
  std::vector<Waveform> music;
  std::vector<Waveform> babble;

  const std::vector<Waveform> &by_class(NoiseClass c) const {
    switch (c) {
      case NoiseClass::kNoise:
        return noise;
      case NoiseClass::kMusic:
        return music;
      default:
        return babble;
    }
  }
};

// Manifest format: `class<TAB>wav_path` with class in {rir,noise,music,babble}.
AugmentCorpus LoadAugmentCorpus(const std::string &manifest_path);

struct WavAugConfig {
  double reverb_prob = 0.8;
  std::vector<double> snr_noise = {0, 5, 10, 15};
  std::vector<double> snr_music = {5, 8, 10, 15};
  std::vector<double> snr_babble = {13, 15, 17, 20};

  const std::vector<double> &snrs(NoiseClass c) const {
    switch (c) {
      case NoiseClass::kNoise:
        return snr_noise;
      case NoiseClass::kMusic:
        return snr_music;
      default:
        return snr_babble;
    }
  }
};

// Full convolution with the RIR, truncated to the input length and aligned
// at the RIR's peak tap, then rescaled to the input's RMS. Throws
// AugmentError on an empty RIR.
Waveform AddReverb(const Waveform &w, const Waveform &rir);

// output = w + g * noise (noise looped/cropped to length) with g chosen so
// 10*log10(P_w / P_{g*noise}) = snr_db over the full segment. Throws
// AugmentError on zero-power noise.
Waveform AddNoise(const Waveform &w, const Waveform &noise, double snr_db);

// The randomized choices of one wavaug_view application, separated from the
// deterministic apply step so tests can force draws.
struct WavAugDraw {
  bool reverb = false;
  int rir_index = 0;
  NoiseClass noise_class = NoiseClass::kNoise;
  int noise_index = 0;
  double snr_db = 0.0;
};

WavAugDraw DrawWavAug(const AugmentCorpus &corpus, const WavAugConfig &cfg,
                      Rng *rng);
Waveform ApplyWavAug(const Waveform &w, const AugmentCorpus &corpus,
                     const WavAugDraw &draw);

// With probability reverb_prob convolve with a uniformly chosen RIR; then
// always add one uniformly chosen noise class at an SNR drawn uniformly from
// that class's list. A documented soft-clip keeps samples within [-4, 4].
Waveform WavAugView(const Waveform &w, const AugmentCorpus &corpus,
                    const WavAugConfig &cfg, Rng *rng);

// Identity on [-3, 3]; beyond that compresses via 3 + tanh(|x| - 3) with the
// input's sign, bounding every output to [-4, 4] (tanh saturates to 1 in
// float for large inputs).
float SoftClip(float x);

struct SpecAugConfig {
  int warp_window = 10;
  int n_time_masks = 2;
  int max_time_mask = 5;
  int n_freq_masks = 2;
  int max_freq_mask = 3;
};

// One sampled spectrogram augmentation: a time-warp (center frame, signed
// displacement) plus start/width pairs for the time and frequency masks.
// Zero widths and zero displacement are no-ops.
struct SpecAugDraw {
  int warp_center = 0;
  int warp_shift = 0;
  std::vector<std::pair<int, int>> time_masks;  // (start frame, width)
  std::vector<std::pair<int, int>> freq_masks;  // (start bin, width)
};

// Samples a draw for a [rows, cols] chunk: warp displacement U[-W, W] about a
// center at least W frames from either edge (skipped for short chunks), then
// mask widths U[0,max] with uniform starts.
SpecAugDraw DrawSpecAug(int rows, int cols, const SpecAugConfig &cfg,
                        Rng *rng);

// Applies a draw: piecewise-linear time warp, then masks; masked cells are
// set to the chunk mean.
FeatureMatrix ApplySpecAug(const FeatureMatrix &chunk, const SpecAugDraw &draw);

// ApplySpecAug(chunk, DrawSpecAug(...)).
FeatureMatrix SpecAug(const FeatureMatrix &chunk, const SpecAugConfig &cfg,
                      Rng *rng);

// Synthetic room impulse response: a unit direct path followed by
// exponentially decaying sparse taps, so tests and the toy corpus need no
// external RIR download.
Waveform SyntheticRir(Rng *rng, double duration_s = 0.25,
                      double decay_s = 0.08, int sample_rate = 16000);

}  // namespace spkcon

#endif  // SPKCON_AUGMENT_H_
