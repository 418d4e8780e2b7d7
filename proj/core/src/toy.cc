// core/src/toy.cc

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

#include "spkcon/toy.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include <fmt/format.h>

#include "spkcon/augment.h"
#include "spkcon/common.h"
#include "spkcon/config.h"
#include "spkcon/rng.h"
#include "spkcon/wav.h"

namespace spkcon {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Two-pole resonator applied in place:
// y[n] = x[n] + 2 r cos(theta) y[n-1] - r^2 y[n-2].
void Resonate(std::vector<float> *x, double freq_hz, double bw_hz, int rate) {
  const double r = std::exp(-kPi * bw_hz / rate);
  const double c1 = 2.0 * r * std::cos(2.0 * kPi * freq_hz / rate);
  const double c2 = -r * r;
  double y1 = 0.0, y2 = 0.0;
  for (float &v : *x) {
    const double y = v + c1 * y1 + c2 * y2;
    y2 = y1;
    y1 = y;
    v = static_cast<float>(y);
  }
}

// Same resonator with a per-sample centre frequency, for formant glides.
void ResonateTrack(std::vector<float> *x, const std::vector<float> &freq_hz,
                   double bw_hz, int rate) {
  const double r = std::exp(-kPi * bw_hz / rate);
  const double c2 = -r * r;
  double y1 = 0.0, y2 = 0.0;
  for (size_t i = 0; i < x->size(); ++i) {
    const double c1 = 2.0 * r * std::cos(2.0 * kPi * freq_hz[i] / rate);
    const double y = (*x)[i] + c1 * y1 + c2 * y2;
    y2 = y1;
    y1 = y;
    (*x)[i] = static_cast<float>(y);
  }
}

double Rms(const std::vector<float> &x) {
  double sq = 0.0;
  for (float v : x) sq += static_cast<double>(v) * v;
  return std::sqrt(sq / std::max<size_t>(1, x.size()));
}

void ScaleTo(std::vector<float> *x, double peak) {
  float maxabs = 0.0f;
  for (float v : *x) maxabs = std::max(maxabs, std::abs(v));
  if (maxabs <= 0.0f) return;
  const float g = static_cast<float>(peak / maxabs);
  for (float &v : *x) v *= g;
}

// A speaker's voice: a fundamental-frequency band, a three-vowel formant
// inventory and a characteristic speaking rate. Chunk-level mean
// normalization in the front end removes any constant spectral shape, so
// speaker identity has to live in the dynamics: which spectral shapes
// alternate, and how fast.
struct SpeakerVoice {
  double f0 = 120.0;          // utterance pitch centre, Hz
  double syllable_s = 0.2;    // mean syllable duration, s
  double vowels[3][2] = {};   // {F1, F2} targets, Hz
};

// One synthetic utterance: a random vowel sequence from the speaker's
// inventory, rendered as a glottal impulse train through two gliding formant
// resonators with per-syllable amplitude arcs, plus breath noise and
// per-utterance channel effects. Syllable lengths, pitch jitter and vowel
// order are redrawn per syllable so no stationary per-utterance rhythm
// exists for a contrastive model to latch onto.
std::vector<float> SynthUtterance(int rate, double dur_s,
                                  const SpeakerVoice &voice, Rng *rng) {
  const int n = static_cast<int>(dur_s * rate);
  std::vector<float> f1(n), f2(n), f0(n), env(n);
  for (int start = 0; start < n;) {
    const int len = std::max(
        1, static_cast<int>(voice.syllable_s * rate *
                            std::exp(rng->Uniform(-0.4, 0.4))));
    const int vowel = static_cast<int>(rng->UniformInt(3));
    const double jitter = 1.0 + rng->Uniform(-0.02, 0.02);
    const int end = std::min(n, start + len);
    for (int i = start; i < end; ++i) {
      const double frac = static_cast<double>(i - start) / len;
      f1[i] = static_cast<float>(voice.vowels[vowel][0]);
      f2[i] = static_cast<float>(voice.vowels[vowel][1]);
      // Mild declination across the syllable; floor keeps every frame
      // voiced enough to survive the energy VAD.
      f0[i] = static_cast<float>(voice.f0 * jitter * (1.0 - 0.04 * frac));
      env[i] = static_cast<float>(
          0.35 + 0.65 * std::pow(std::max(0.0, std::sin(kPi * frac)), 0.7));
    }
    start = end;
  }
  // One-pole smoothing of the formant targets gives ~25 ms glides.
  const double a = std::exp(-2.0 * kPi * 16.0 / rate);
  double s1 = f1[0], s2 = f2[0];
  for (int i = 0; i < n; ++i) {
    s1 = a * s1 + (1.0 - a) * f1[i];
    s2 = a * s2 + (1.0 - a) * f2[i];
    f1[i] = static_cast<float>(s1);
    f2[i] = static_cast<float>(s2);
  }
  std::vector<float> voiced(n, 0.0f);
  double phase = rng->Uniform();  // pulse phase in periods
  for (int i = 0; i < n; ++i) {
    phase += f0[i] / rate;
    if (phase >= 1.0) {
      phase -= 1.0;
      voiced[i] = 1.0f;
    }
  }
  ResonateTrack(&voiced, f1, 90.0, rate);
  ResonateTrack(&voiced, f2, 140.0, rate);
  // Breath noise ~26 dB below the voiced signal.
  const double breath = Rms(voiced) * std::pow(10.0, -26.0 / 20.0);
  for (float &v : voiced)
    v += static_cast<float>(breath * rng->Normal());
  for (int i = 0; i < n; ++i) voiced[i] *= env[i];
  // Channel: spectral tilt, noise floor, utterance gain.
  const double tilt = rng->Uniform(-0.35, 0.35);
  double prev = 0.0;
  for (float &v : voiced) {
    const double cur = v;
    v = static_cast<float>(cur - tilt * prev);
    prev = cur;
  }
  const double snr_db = rng->Uniform(16.0, 30.0);
  const double floor_rms = Rms(voiced) * std::pow(10.0, -snr_db / 20.0);
  for (float &v : voiced)
    v += static_cast<float>(floor_rms * rng->Normal());
  ScaleTo(&voiced, rng->Uniform(0.35, 0.8));
  return voiced;
}

std::vector<float> SynthNoise(int n, Rng *rng) {
  std::vector<float> x(n);
  for (float &v : x) v = static_cast<float>(rng->Normal());
  ScaleTo(&x, 0.5);
  return x;
}

std::vector<float> SynthMusic(int n, int rate, Rng *rng) {
  std::vector<float> x(n, 0.0f);
  const int tones = 3 + static_cast<int>(rng->UniformInt(2));
  for (int k = 0; k < tones; ++k) {
    const double f = rng->Uniform(180.0, 1400.0);
    const double a = rng->Uniform(0.3, 1.0);
    const double ph = rng->Uniform(0.0, 2.0 * kPi);
    const double wobble = rng->Uniform(0.1, 0.5);
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      const double amp = a * (0.7 + 0.3 * std::sin(2.0 * kPi * wobble * t));
      x[i] += static_cast<float>(amp * std::sin(2.0 * kPi * f * t + ph));
    }
  }
  ScaleTo(&x, 0.5);
  return x;
}

std::vector<float> SynthBabble(int n, int rate, Rng *rng) {
  std::vector<float> x(n, 0.0f);
  for (int v = 0; v < 6; ++v) {
    const double f0 = rng->Uniform(90.0, 250.0);
    const double formant = rng->Uniform(350.0, 2200.0);
    std::vector<float> voice(n, 0.0f);
    double phase = rng->Uniform();
    for (int i = 0; i < n; ++i) {
      phase += f0 / rate;
      if (phase >= 1.0) {
        phase -= 1.0;
        voice[i] = 1.0f;
      }
    }
    Resonate(&voice, formant, 120.0, rate);
    const double env_rate = rng->Uniform(1.5, 4.0);
    const double env_phase = rng->Uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / rate;
      const double s = std::sin(2.0 * kPi * env_rate * t + env_phase);
      voice[i] *= static_cast<float>(s * s);
    }
    for (int i = 0; i < n; ++i) x[i] += voice[i];
  }
  ScaleTo(&x, 0.5);
  return x;
}

}  // namespace

ToyOutputs GenerateToyCorpus(const std::string &out_dir, uint64_t seed,
                             const ToyConfig &toy) {
  namespace fs = std::filesystem;
  if (toy.speakers < 2 || toy.eval_speakers < 1 ||
      toy.eval_speakers >= toy.speakers || toy.utts_per_speaker < 2)
    throw ContractError("toy corpus needs >= 2 speakers, >= 2 utterances "
                        "each, and a proper train/eval split");
  fs::create_directories(fs::path(out_dir) / "wav");
  fs::create_directories(fs::path(out_dir) / "aug");

  const int train_speakers = toy.speakers - toy.eval_speakers;
  std::ofstream train_tsv(fs::path(out_dir) / "train.tsv");
  std::ofstream eval_tsv(fs::path(out_dir) / "eval.tsv");
  if (!train_tsv || !eval_tsv)
    throw IngestError("cannot write manifests under '" + out_dir + "'");

  std::vector<std::vector<std::string>> eval_utts(toy.eval_speakers);
  for (int s = 0; s < toy.speakers; ++s) {
    const std::string spk = fmt::format("spk{:02d}", s);
    // Disjoint pitch bands: 4 Hz spacing vs +/- 1.9 Hz jitter. The vowel
    // inventory sits on a (16, 45) Hz formant grid indexed by (s mod 7,
    // s mod 5), so any run of 35 speakers gets distinct inventories, and the
    // speaking rate steps by 1.5 ms per speaker. The steps are kept well
    // under the within-utterance content variation, so an untrained encoder
    // scores near chance while the factors stay learnable.
    const double f0_base = 100.0 + 4.0 * s;
    SpeakerVoice voice;
    voice.syllable_s = 0.18 + 0.0015 * s;
    const double grid1 = 16.0 * (s % 7);
    const double grid2 = 45.0 * (s % 5);
    const double base1[3] = {350.0, 560.0, 430.0};
    const double base2[3] = {950.0, 1450.0, 2050.0};
    for (int v = 0; v < 3; ++v) {
      voice.vowels[v][0] = base1[v] + grid1;
      voice.vowels[v][1] = base2[v] + grid2;
    }
    for (int u = 0; u < toy.utts_per_speaker; ++u) {
      Rng rng(DeriveSeed(seed, "toy-utt", s, u));
      const std::string utt = fmt::format("{}_u{:02d}", spk, u);
      const double dur = rng.Uniform(toy.min_dur_s, toy.max_dur_s);
      voice.f0 = f0_base + rng.Uniform(-1.9, 1.9);
      Waveform w;
      w.sample_rate = toy.sample_rate;
      w.samples = SynthUtterance(toy.sample_rate, dur, voice, &rng);
      const fs::path wav_path = fs::path(out_dir) / "wav" / (utt + ".wav");
      WriteWav(wav_path.string(), w);
      const std::string line =
          fmt::format("{}\t{}\t{}\n", utt, spk, wav_path.string());
      if (s < train_speakers) {
        train_tsv << line;
      } else {
        eval_tsv << line;
        eval_utts[s - train_speakers].push_back(utt);
      }
    }
  }
  train_tsv.close();
  eval_tsv.close();

  // Balanced trials: every within-speaker pair of the held-out speakers,
  // matched by an equal number of distinct cross-speaker pairs.
  std::ofstream trials(fs::path(out_dir) / "trials.txt");
  if (!trials) throw IngestError("cannot write trials under '" + out_dir + "'");
  int target_count = 0;
  for (const auto &utts : eval_utts) {
    for (size_t i = 0; i < utts.size(); ++i)
      for (size_t j = i + 1; j < utts.size(); ++j) {
        trials << fmt::format("1 {} {}\n", utts[i], utts[j]);
        ++target_count;
      }
  }
  Rng trial_rng(DeriveSeed(seed, "toy-trials"));
  std::set<std::pair<std::string, std::string>> used;
  int nontargets = 0;
  while (nontargets < target_count) {
    const int sa = static_cast<int>(trial_rng.UniformInt(toy.eval_speakers));
    int sb = static_cast<int>(trial_rng.UniformInt(toy.eval_speakers - 1));
    if (sb >= sa) ++sb;
    const std::string &a =
        eval_utts[sa][trial_rng.UniformInt(eval_utts[sa].size())];
    const std::string &b =
        eval_utts[sb][trial_rng.UniformInt(eval_utts[sb].size())];
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    if (!used.insert(key).second) continue;
    trials << fmt::format("0 {} {}\n", a, b);
    ++nontargets;
  }
  trials.close();

  // Augmentation materials: impulse responses plus the three noise classes.
  std::ofstream aug_tsv(fs::path(out_dir) / "aug.tsv");
  if (!aug_tsv)
    throw IngestError("cannot write aug manifest under '" + out_dir + "'");
  const int aug_len = 3 * toy.sample_rate;
  auto emit_aug = [&](const std::string &cls, const std::string &stem,
                      const Waveform &w) {
    const fs::path p = fs::path(out_dir) / "aug" / (stem + ".wav");
    WriteWav(p.string(), w);
    aug_tsv << fmt::format("{}\t{}\n", cls, p.string());
  };
  for (int i = 0; i < toy.num_rirs; ++i) {
    Rng rng(DeriveSeed(seed, "toy-rir", i));
    emit_aug("rir", fmt::format("rir{:02d}", i), SyntheticRir(&rng));
  }
  for (int i = 0; i < toy.num_noise; ++i) {
    Rng rng(DeriveSeed(seed, "toy-noise", i));
    Waveform w{SynthNoise(aug_len, &rng), toy.sample_rate};
    emit_aug("noise", fmt::format("noise{:02d}", i), w);
  }
  for (int i = 0; i < toy.num_music; ++i) {
    Rng rng(DeriveSeed(seed, "toy-music", i));
    Waveform w{SynthMusic(aug_len, toy.sample_rate, &rng), toy.sample_rate};
    emit_aug("music", fmt::format("music{:02d}", i), w);
  }
  for (int i = 0; i < toy.num_babble; ++i) {
    Rng rng(DeriveSeed(seed, "toy-babble", i));
    Waveform w{SynthBabble(aug_len, toy.sample_rate, &rng), toy.sample_rate};
    emit_aug("babble", fmt::format("babble{:02d}", i), w);
  }
  aug_tsv.close();

  ToyOutputs out;
  out.train_manifest = (fs::path(out_dir) / "train.tsv").string();
  out.eval_manifest = (fs::path(out_dir) / "eval.tsv").string();
  out.trials = (fs::path(out_dir) / "trials.txt").string();
  out.aug_manifest = (fs::path(out_dir) / "aug.tsv").string();

  RunConfig cfg;
  cfg.train_manifest = out.train_manifest;
  cfg.aug_manifest = out.aug_manifest;
  cfg.eval_manifest = out.eval_manifest;
  cfg.trials = out.trials;
  cfg.out_dir = (fs::path(out_dir) / "run").string();
  cfg.seed = seed;
  const fs::path conf_path = fs::path(out_dir) / "train.conf";
  WriteRunConfig(conf_path.string(), cfg);
  out.config = conf_path.string();
  return out;
}

}  // namespace spkcon
