// core/include/spkcon/trainer.h

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

#ifndef SPKCON_TRAINER_H_
#define SPKCON_TRAINER_H_

#include <cstdint>
#include <string>

#include "spkcon/config.h"
#include "spkcon/metrics.h"

namespace spkcon {

struct TrainResult {
  std::string last_checkpoint;
  int64_t steps = 0;
  double final_loss = 0.0;
};

// Runs the full training loop described by the config: per-view pipeline
// (reverb/noise augmentation on the waveform, MFCC restricted to the
// clean-signal VAD mask, random chunk, CMN, optional spectral augmentation),
// the configured contrastive objective, cosine learning-rate schedule, EMA
// key encoder and negative queue for the MoCo family, epoch-wise clustering
// for the prototype phase, a checkpoint per epoch (pruned to
// checkpoints.keep) and one key=value metrics line per step appended to
// <out_dir>/metrics.log. Set cfg.resume to continue from a checkpoint; the
// continuation reproduces the unbroken run exactly.
TrainResult Train(const RunConfig &cfg);

// Saves a freshly initialized (untrained) encoder as a checkpoint, e.g. as
// a scoring baseline.
void SaveInitCheckpoint(const std::string &path, const std::string &arch,
                        uint64_t seed);

// Encodes every usable utterance of a manifest with the checkpoint's query
// encoder in eval mode (full post-VAD utterance, CMN) and returns unit-norm
// embeddings keyed by utterance id. Utterances whose post-VAD length is
// below the encoder's minimum are skipped with a warning.
EmbeddingMap ExtractEmbeddings(const std::string &ckpt_path,
                               const std::string &manifest_path);

struct EvalReport {
  double eer = 0.0;      // fraction, not percent
  double min_dcf = 0.0;  // normalized, p_target = 0.01
  double eer_threshold = 0.0;
  double dcf_threshold = 0.0;
  int num_trials = 0;
};

EvalReport EvaluateEmbeddings(const EmbeddingMap &embeddings,
                              const std::string &trials_path);
EvalReport EvaluateCheckpoint(const std::string &ckpt_path,
                              const std::string &manifest_path,
                              const std::string &trials_path);

// Machine-readable key=value report and its parser (round-trip safe), plus
// a human-readable table for the console.
std::string FormatReport(const EvalReport &report);
EvalReport ParseReport(const std::string &text);
void WriteReport(const std::string &path, const EvalReport &report);
EvalReport LoadReport(const std::string &path);
std::string FormatReportTable(const EvalReport &report);

}  // namespace spkcon

#endif  // SPKCON_TRAINER_H_
