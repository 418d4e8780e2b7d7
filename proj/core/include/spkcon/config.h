// core/include/spkcon/config.h

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

#ifndef SPKCON_CONFIG_H_
#define SPKCON_CONFIG_H_

#include <cstdint>
#include <string>

namespace spkcon {

enum class LossKind { kSimclr, kMoco, kProto, kSemi };

LossKind ParseLossKind(const std::string &name);
std::string LossKindName(LossKind kind);

// One training / evaluation run. Defaults are the toy-scale preset; the
// paper-scale settings are reachable through the config file (arch, queue
// size, epochs and so on).
struct RunConfig {
  // Data.
  std::string train_manifest;
  std::string aug_manifest;   // optional; required when wav_aug is on
  std::string eval_manifest;  // used by `eval` when no manifest flag given
  std::string trials;
  std::string out_dir = "run";

  // Model.
  std::string arch = "tdnn-tiny";

  // Objective.
  LossKind loss = LossKind::kMoco;
  double tau = 0.1;      // InfoNCE temperature
  double lambda = 9.0;   // weight of the unsupervised term in semi mode
  double alpha = 0.25;   // weight of the ProtoNCE term in proto mode
  int queue_size = 512;  // MoCo negative queue capacity
  double ema_momentum = 0.9;

  // Prototype phase.
  int clusters = 20;          // M
  int proto_negatives = 64;   // R
  int warmup_epochs = 12;     // MoCo-only epochs before ProtoNCE kicks in
  int cluster_every = 1;      // recluster period in epochs

  // Schedule.
  int epochs = 30;
  int batch_size = 64;
  double lr_start = 0.05;
  double lr_end = 1e-4;
  double momentum = 0.9;

  // Semi-supervised batch mixing.
  double labeled_fraction = 0.1;

  // Augmentation.
  bool wav_aug = true;
  bool spec_aug = false;

  // Chunking (frames).
  int chunk_min = 200;
  int chunk_max = 400;

  // Bookkeeping.
  uint64_t seed = 17;
  int keep_checkpoints = 3;
  std::string resume;  // checkpoint path to continue from
};

// Parses a flat key=value file: one pair per line, '#' comments, blank lines
// ignored, whitespace around key and value trimmed. Unknown keys and
// malformed values raise ContractError with the line number. When the
// SPKCON_SEED environment variable is set it overrides the seed key.
RunConfig LoadRunConfig(const std::string &path);

// Same grammar from an in-memory string ("<config>" used in errors).
// apply_env controls the SPKCON_SEED override.
RunConfig ParseRunConfig(const std::string &text, bool apply_env = true);

// Serializes a config in the same key=value grammar.
std::string FormatRunConfig(const RunConfig &cfg);
void WriteRunConfig(const std::string &path, const RunConfig &cfg);

}  // namespace spkcon

#endif  // SPKCON_CONFIG_H_
