// core/src/frontend.cc

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

#include "spkcon/frontend.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "spkcon/common.h"
#include "spkcon/dsp.h"

namespace spkcon {

namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

constexpr double kLogFloor = 1e-10;  // mel energy floor before log

}  // namespace

int NumFrames(int64_t num_samples, const FrontendConfig &cfg) {
  if (num_samples < cfg.win_samples) return 0;
  return static_cast<int>((num_samples - cfg.win_samples) / cfg.hop_samples) +
         1;
}

std::vector<uint8_t> EnergyVad(const Waveform &w, const FrontendConfig &cfg) {
  const int t = NumFrames(static_cast<int64_t>(w.samples.size()), cfg);
  if (t <= 0) {
    throw FrontendError(
        fmt::format("utterance of {} samples is shorter than one {}-sample "
                    "window",
                    w.samples.size(), cfg.win_samples));
  }
  std::vector<double> log_e(t);
  std::vector<double> power(t);
  double mean_log_e = 0.0;
  for (int f = 0; f < t; ++f) {
    const float *frame = w.samples.data() + static_cast<size_t>(f) * cfg.hop_samples;
    double acc = 0.0;
    for (int i = 0; i < cfg.win_samples; ++i) {
      acc += static_cast<double>(frame[i]) * frame[i];
    }
    power[f] = acc / cfg.win_samples;
    log_e[f] = std::log(power[f] + 1e-12);
    mean_log_e += log_e[f];
  }
  mean_log_e /= t;

  std::vector<uint8_t> keep(t, 0);
  int kept = 0;
  for (int f = 0; f < t; ++f) {
    if (log_e[f] > mean_log_e + cfg.vad_offset &&
        power[f] > cfg.vad_power_floor) {
      keep[f] = 1;
      ++kept;
    }
  }
  if (kept == 0) {
    throw FrontendError("energy VAD removed every frame (utterance unusable)");
  }
  return keep;
}

struct MfccComputer::Impl {
  explicit Impl(const FrontendConfig &cfg)
      : fft(cfg.fft_size), window(cfg.win_samples) {
    const int bins = cfg.fft_size / 2 + 1;
    // Hamming window.
    for (int i = 0; i < cfg.win_samples; ++i) {
      window[i] =
          0.54 - 0.46 * std::cos(2.0 * M_PI * i / (cfg.win_samples - 1));
    }
    // Triangular mel filterbank between mel_low_hz and mel_high_hz.
    const double mel_lo = HzToMel(cfg.mel_low_hz);
    const double mel_hi = HzToMel(cfg.mel_high_hz);
    std::vector<double> edges(cfg.num_mel + 2);
    for (int i = 0; i < cfg.num_mel + 2; ++i) {
      edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.num_mel + 1));
    }
    filter_weights.assign(static_cast<size_t>(cfg.num_mel) * bins, 0.0);
    const double hz_per_bin =
        static_cast<double>(cfg.sample_rate) / cfg.fft_size;
    for (int m = 0; m < cfg.num_mel; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      for (int k = 0; k < bins; ++k) {
        const double f = k * hz_per_bin;
        double wgt = 0.0;
        if (f > lo && f < mid) {
          wgt = (f - lo) / (mid - lo);
        } else if (f >= mid && f < hi) {
          wgt = (hi - f) / (hi - mid);
        }
        filter_weights[static_cast<size_t>(m) * bins + k] = wgt;
      }
    }
    // Orthonormal DCT-II: c[k] = s_k * sum_m cos(pi*k*(m+0.5)/M) * x[m].
    dct.assign(static_cast<size_t>(cfg.num_ceps) * cfg.num_mel, 0.0);
    for (int k = 0; k < cfg.num_ceps; ++k) {
      const double scale = k == 0 ? std::sqrt(1.0 / cfg.num_mel)
                                  : std::sqrt(2.0 / cfg.num_mel);
      for (int m = 0; m < cfg.num_mel; ++m) {
        dct[static_cast<size_t>(k) * cfg.num_mel + m] =
            scale * std::cos(M_PI * k * (m + 0.5) / cfg.num_mel);
      }
    }
  }

  RealFft fft;
  std::vector<double> window;
  std::vector<double> filter_weights;  // [num_mel x bins]
  std::vector<double> dct;             // [num_ceps x num_mel]
};

MfccComputer::MfccComputer(const FrontendConfig &cfg)
    : cfg_(cfg), impl_(std::make_unique<Impl>(cfg)) {
  if (cfg.num_ceps > cfg.num_mel) {
    throw ContractError(
        fmt::format("num_ceps {} exceeds num_mel {}", cfg.num_ceps,
                    cfg.num_mel));
  }
  if (cfg.fft_size < cfg.win_samples) {
    throw ContractError("fft_size must be >= win_samples");
  }
}

MfccComputer::~MfccComputer() = default;

FeatureMatrix MfccComputer::Compute(const Waveform &w) {
  std::vector<uint8_t> keep;  // empty = all
  return ComputeMasked(w, keep);
}

FeatureMatrix MfccComputer::ComputeMasked(const Waveform &w,
                                          const std::vector<uint8_t> &keep) {
  const int t = NumFrames(static_cast<int64_t>(w.samples.size()), cfg_);
  if (t <= 0) {
    throw FrontendError(fmt::format(
        "input of {} samples is too short for MFCC (needs >= {})",
        w.samples.size(), cfg_.win_samples));
  }
  if (!keep.empty() && static_cast<int>(keep.size()) != t) {
    throw ContractError(fmt::format(
        "VAD mask length {} does not match frame count {}", keep.size(), t));
  }
  int out_rows = 0;
  if (keep.empty()) {
    out_rows = t;
  } else {
    for (uint8_t k : keep) out_rows += k ? 1 : 0;
  }

  const int bins = cfg_.fft_size / 2 + 1;
  FeatureMatrix out;
  out.rows = out_rows;
  out.cols = cfg_.num_ceps;
  out.data.resize(static_cast<size_t>(out_rows) * cfg_.num_ceps);

  // Whole-signal pre-emphasis (y[0] uses x[-1] = x[0] by convention).
  std::vector<double> pre(w.samples.size());
  pre[0] = w.samples[0] - cfg_.preemphasis * w.samples[0];
  for (size_t i = 1; i < w.samples.size(); ++i) {
    pre[i] = w.samples[i] - cfg_.preemphasis * w.samples[i - 1];
  }

  std::vector<double> frame(cfg_.fft_size, 0.0);
  std::vector<std::complex<double>> spec(bins);
  std::vector<double> power(bins);
  std::vector<double> logmel(cfg_.num_mel);
  int row = 0;
  for (int f = 0; f < t; ++f) {
    if (!keep.empty() && !keep[f]) continue;
    const double *src = pre.data() + static_cast<size_t>(f) * cfg_.hop_samples;
    for (int i = 0; i < cfg_.win_samples; ++i) {
      frame[i] = src[i] * impl_->window[i];
    }
    std::fill(frame.begin() + cfg_.win_samples, frame.end(), 0.0);
    impl_->fft.Forward(frame.data(), spec.data());
    for (int k = 0; k < bins; ++k) power[k] = std::norm(spec[k]);
    for (int m = 0; m < cfg_.num_mel; ++m) {
      const double *wgt = impl_->filter_weights.data() +
                          static_cast<size_t>(m) * bins;
      double acc = 0.0;
      for (int k = 0; k < bins; ++k) acc += wgt[k] * power[k];
      logmel[m] = std::log(std::max(acc, kLogFloor));
    }
    float *dst = out.data.data() + static_cast<size_t>(row) * cfg_.num_ceps;
    for (int k = 0; k < cfg_.num_ceps; ++k) {
      const double *drow = impl_->dct.data() +
                           static_cast<size_t>(k) * cfg_.num_mel;
      double acc = 0.0;
      for (int m = 0; m < cfg_.num_mel; ++m) acc += drow[m] * logmel[m];
      dst[k] = static_cast<float>(acc);
    }
    ++row;
  }
  return out;
}

void MeanNormalize(FeatureMatrix *m) {
  if (m->rows == 0) return;
  for (int c = 0; c < m->cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < m->rows; ++r) acc += m->at(r, c);
    const float mean = static_cast<float>(acc / m->rows);
    for (int r = 0; r < m->rows; ++r) m->at(r, c) -= mean;
  }
}

std::optional<FeatureMatrix> SampleChunk(const FeatureMatrix &features,
                                         const FrontendConfig &cfg, Rng *rng) {
  if (features.rows < cfg.chunk_min_frames) return std::nullopt;
  int len = static_cast<int>(
      rng->UniformIntRange(cfg.chunk_min_frames, cfg.chunk_max_frames));
  len = std::min(len, features.rows);
  const int start = static_cast<int>(rng->UniformInt(features.rows - len + 1));
  FeatureMatrix chunk;
  chunk.rows = len;
  chunk.cols = features.cols;
  chunk.data.assign(
      features.data.begin() + static_cast<size_t>(start) * features.cols,
      features.data.begin() +
          static_cast<size_t>(start + len) * features.cols);
  MeanNormalize(&chunk);
  return chunk;
}

std::vector<ManifestEntry> LoadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IngestError(fmt::format("cannot open manifest '{}'", path));
  std::vector<ManifestEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const size_t a = line.find('\t');
    const size_t b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (a == std::string::npos || b == std::string::npos ||
        line.find('\t', b + 1) != std::string::npos) {
      throw IngestError(fmt::format(
          "{}:{}: expected 'utt<TAB>speaker<TAB>path', got '{}'", path,
          lineno, line));
    }
    ManifestEntry e;
    e.utt = line.substr(0, a);
    e.spk = line.substr(a + 1, b - a - 1);
    e.path = line.substr(b + 1);
    if (e.utt.empty() || e.spk.empty() || e.path.empty()) {
      throw IngestError(
          fmt::format("{}:{}: empty field in manifest line", path, lineno));
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    throw IngestError(fmt::format("manifest '{}' has no entries", path));
  }
  return entries;
}

}  // namespace spkcon
