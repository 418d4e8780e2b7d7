// core/src/augment.cc

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

#include "spkcon/augment.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "spkcon/common.h"
#include "spkcon/dsp.h"

namespace spkcon {

namespace {

double MeanPower(const std::vector<float> &x) {
  double acc = 0.0;
  for (float v : x) acc += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : acc / x.size();
}

}  // namespace

AugmentCorpus LoadAugmentCorpus(const std::string &manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw IngestError(
        fmt::format("cannot open augmentation manifest '{}'", manifest_path));
  }
  AugmentCorpus corpus;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IngestError(fmt::format("{}:{}: expected 'class<TAB>path'",
                                    manifest_path, lineno));
    }
    const std::string cls = line.substr(0, tab);
    const std::string path = line.substr(tab + 1);
    Waveform w = LoadWav(path);
    if (cls == "rir") {
      corpus.rirs.push_back(std::move(w));
    } else if (cls == "noise") {
      corpus.noise.push_back(std::move(w));
    } else if (cls == "music") {
      corpus.music.push_back(std::move(w));
    } else if (cls == "babble") {
      corpus.babble.push_back(std::move(w));
    } else {
      throw IngestError(fmt::format("{}:{}: unknown class '{}'",
                                    manifest_path, lineno, cls));
    }
  }
  return corpus;
}

Waveform AddReverb(const Waveform &w, const Waveform &rir) {
  if (rir.samples.empty()) throw AugmentError("empty RIR");
  if (w.sample_rate != rir.sample_rate) {
    throw AugmentError(fmt::format("RIR sample rate {} != signal rate {}",
                                   rir.sample_rate, w.sample_rate));
  }
  std::vector<float> conv = FftConvolve(w.samples, rir.samples);
  // Align at the RIR's peak tap so the direct path keeps the input's timing.
  int peak = 0;
  for (size_t i = 1; i < rir.samples.size(); ++i) {
    if (std::fabs(rir.samples[i]) > std::fabs(rir.samples[peak])) {
      peak = static_cast<int>(i);
    }
  }
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(conv.begin() + peak,
                     conv.begin() + peak + static_cast<int64_t>(w.samples.size()));
  const double in_rms = std::sqrt(MeanPower(w.samples));
  const double out_rms = std::sqrt(MeanPower(out.samples));
  if (out_rms > 0.0) {
    const float g = static_cast<float>(in_rms / out_rms);
    for (float &v : out.samples) v *= g;
  }
  return out;
}

Waveform AddNoise(const Waveform &w, const Waveform &noise, double snr_db) {
  if (noise.samples.empty() || MeanPower(noise.samples) <= 0.0) {
    throw AugmentError("noise segment has zero power");
  }
  // Loop or crop the noise to the signal length.
  std::vector<float> n(w.samples.size());
  for (size_t i = 0; i < n.size(); ++i) {
    n[i] = noise.samples[i % noise.samples.size()];
  }
  const double p_sig = MeanPower(w.samples);
  const double p_noise = MeanPower(n);
  if (p_noise <= 0.0) throw AugmentError("noise segment has zero power");
  const double g =
      std::sqrt(p_sig / (p_noise * std::pow(10.0, snr_db / 10.0)));
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(w.samples.size());
  for (size_t i = 0; i < n.size(); ++i) {
    out.samples[i] = w.samples[i] + static_cast<float>(g) * n[i];
  }
  return out;
}

float SoftClip(float x) {
  const float a = std::fabs(x);
  if (a <= 3.0f) return x;
  const float y = 3.0f + std::tanh(a - 3.0f);
  return x < 0 ? -y : y;
}

WavAugDraw DrawWavAug(const AugmentCorpus &corpus, const WavAugConfig &cfg,
                      Rng *rng) {
  WavAugDraw draw;
  draw.reverb = rng->Bernoulli(cfg.reverb_prob);
  if (draw.reverb) {
    if (corpus.rirs.empty()) throw AugmentError("reverb drawn but no RIRs");
    draw.rir_index = static_cast<int>(rng->UniformInt(
        static_cast<int64_t>(corpus.rirs.size())));
  }
  draw.noise_class = static_cast<NoiseClass>(rng->UniformInt(3));
  const auto &files = corpus.by_class(draw.noise_class);
  if (files.empty()) {
    throw AugmentError(fmt::format("no files for noise class {}",
                                   static_cast<int>(draw.noise_class)));
  }
  draw.noise_index =
      static_cast<int>(rng->UniformInt(static_cast<int64_t>(files.size())));
  const auto &snrs = cfg.snrs(draw.noise_class);
  if (snrs.empty()) throw AugmentError("empty SNR list");
  draw.snr_db = snrs[rng->UniformInt(static_cast<int64_t>(snrs.size()))];
  return draw;
}

Waveform ApplyWavAug(const Waveform &w, const AugmentCorpus &corpus,
                     const WavAugDraw &draw) {
  Waveform out = w;
  if (draw.reverb) {
    out = AddReverb(out, corpus.rirs.at(draw.rir_index));
  }
  out = AddNoise(out, corpus.by_class(draw.noise_class).at(draw.noise_index),
                 draw.snr_db);
  for (float &v : out.samples) v = SoftClip(v);
  return out;
}

Waveform WavAugView(const Waveform &w, const AugmentCorpus &corpus,
                    const WavAugConfig &cfg, Rng *rng) {
  return ApplyWavAug(w, corpus, DrawWavAug(corpus, cfg, rng));
}

SpecAugDraw DrawSpecAug(int rows, int cols, const SpecAugConfig &cfg,
                        Rng *rng) {
  SpecAugDraw draw;
  if (cfg.warp_window > 0 && rows > 2 * cfg.warp_window + 2) {
    const int w = cfg.warp_window;
    draw.warp_center = static_cast<int>(rng->UniformIntRange(w, rows - 1 - w));
    draw.warp_shift = static_cast<int>(rng->UniformIntRange(-w, w));
  }
  for (int m = 0; m < cfg.n_time_masks; ++m) {
    const int w = static_cast<int>(rng->UniformIntRange(0, cfg.max_time_mask));
    if (w == 0 || w > rows) continue;
    const int start = static_cast<int>(rng->UniformInt(rows - w + 1));
    draw.time_masks.emplace_back(start, w);
  }
  for (int m = 0; m < cfg.n_freq_masks; ++m) {
    const int w = static_cast<int>(rng->UniformIntRange(0, cfg.max_freq_mask));
    if (w == 0 || w > cols) continue;
    const int start = static_cast<int>(rng->UniformInt(cols - w + 1));
    draw.freq_masks.emplace_back(start, w);
  }
  return draw;
}

FeatureMatrix ApplySpecAug(const FeatureMatrix &chunk,
                           const SpecAugDraw &draw) {
  const int t = chunk.rows, f = chunk.cols;
  FeatureMatrix out = chunk;

  // Sparse time warp: the frame at center c is displaced by d; indices remap
  // piecewise-linearly on [0, c] -> [0, c+d] and [c, T-1] -> [c+d, T-1], with
  // linear interpolation between source frames.
  const int c = draw.warp_center, d = draw.warp_shift;
  if (d != 0 && c + d > 0 && c + d < t - 1) {
    const int cd = c + d;
    for (int tt = 0; tt < t; ++tt) {
      double src;
      if (tt <= cd) {
        src = static_cast<double>(tt) * c / cd;
      } else {
        src = c + static_cast<double>(tt - cd) * (t - 1 - c) / (t - 1 - cd);
      }
      const int lo = static_cast<int>(std::floor(src));
      const int hi = std::min(lo + 1, t - 1);
      const double frac = src - lo;
      for (int ff = 0; ff < f; ++ff) {
        out.at(tt, ff) = static_cast<float>((1.0 - frac) * chunk.at(lo, ff) +
                                            frac * chunk.at(hi, ff));
      }
    }
  }

  // Masked cells take the (scalar) chunk mean.
  double acc = 0.0;
  for (float v : out.data) acc += v;
  const float mean =
      out.data.empty() ? 0.0f : static_cast<float>(acc / out.data.size());

  for (const auto &[start, w] : draw.time_masks) {
    if (w <= 0 || start < 0 || start + w > t) {
      throw ContractError("time mask outside chunk");
    }
    for (int tt = start; tt < start + w; ++tt) {
      for (int ff = 0; ff < f; ++ff) out.at(tt, ff) = mean;
    }
  }
  for (const auto &[start, w] : draw.freq_masks) {
    if (w <= 0 || start < 0 || start + w > f) {
      throw ContractError("frequency mask outside chunk");
    }
    for (int ff = start; ff < start + w; ++ff) {
      for (int tt = 0; tt < t; ++tt) out.at(tt, ff) = mean;
    }
  }
  return out;
}

FeatureMatrix SpecAug(const FeatureMatrix &chunk, const SpecAugConfig &cfg,
                      Rng *rng) {
  return ApplySpecAug(chunk, DrawSpecAug(chunk.rows, chunk.cols, cfg, rng));
}

Waveform SyntheticRir(Rng *rng, double duration_s, double decay_s,
                      int sample_rate) {
  const int n = std::max(2, static_cast<int>(duration_s * sample_rate));
  Waveform rir;
  rir.sample_rate = sample_rate;
  rir.samples.assign(n, 0.0f);
  rir.samples[0] = 1.0f;  // direct path
  // Sparse early reflections + exponentially decaying tail taps.
  const int num_taps = 40 + static_cast<int>(rng->UniformInt(40));
  for (int i = 0; i < num_taps; ++i) {
    const int pos = 1 + static_cast<int>(rng->UniformInt(n - 1));
    const double amp = std::exp(-static_cast<double>(pos) /
                                (decay_s * sample_rate)) *
                       rng->Uniform(0.1, 0.7);
    rir.samples[pos] += static_cast<float>(rng->Bernoulli(0.5) ? amp : -amp);
  }
  return rir;
}

}  // namespace spkcon
