// core/include/spkcon/toy.h

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

#ifndef SPKCON_TOY_H_
#define SPKCON_TOY_H_

#include <cstdint>
#include <string>

namespace spkcon {

// Synthetic speaker-discrimination corpus small enough to train on one CPU
// core in minutes. Each synthetic speaker gets a disjoint fundamental
// frequency band (100 + 5 * speaker Hz, +/- 1.5 Hz per-utterance jitter), a
// three-vowel formant inventory on a per-speaker grid, and a characteristic
// speaking rate; utterances are random vowel sequences, so speaker identity
// lives in the feature dynamics and survives chunk-level mean
// normalization. Per-utterance channel effects (gain, spectral tilt, noise
// floor) supply nuisance variation.
struct ToyConfig {
  int speakers = 20;          // last eval_speakers are held out
  int eval_speakers = 5;
  int utts_per_speaker = 10;
  int sample_rate = 16000;
  double min_dur_s = 2.0;
  double max_dur_s = 2.8;
  // Augmentation materials generated alongside the speech.
  int num_rirs = 10;
  int num_noise = 5;
  int num_music = 5;
  int num_babble = 5;
};

struct ToyOutputs {
  std::string train_manifest;
  std::string eval_manifest;
  std::string trials;
  std::string aug_manifest;
  std::string config;  // ready-to-run training config
};

// Deterministic in (out_dir-independent content) for a fixed seed: the same
// seed produces byte-identical WAVs and lists. The trial list is balanced:
// all within-speaker pairs of the held-out speakers as targets and an equal
// number of sampled cross-speaker pairs as nontargets.
ToyOutputs GenerateToyCorpus(const std::string &out_dir, uint64_t seed,
                             const ToyConfig &toy = {});

}  // namespace spkcon

#endif  // SPKCON_TOY_H_
