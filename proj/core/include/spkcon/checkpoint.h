// core/include/spkcon/checkpoint.h

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

#ifndef SPKCON_CHECKPOINT_H_
#define SPKCON_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "spkcon/prototypes.h"

namespace spkcon {

struct NamedArray {
  std::string name;
  std::vector<int> shape;
  std::vector<float> data;
};

// Everything needed to resume training exactly: both encoder copies with
// their batch-norm running statistics (names prefixed "q." / "k."),
// optimizer velocities, the negative queue (rows oldest-first), the
// prototype bank, and the training position. Stored as a little-endian
// binary file with magic "SPKC".
struct Checkpoint {
  uint32_t version = 1;
  std::string arch;    // encoder preset name
  uint64_t seed = 0;   // master seed the run derives streams from
  int64_t step = 0;    // global steps completed
  int32_t epoch = 0;   // epochs completed
  std::vector<NamedArray> params;      // q.* / k.* tensors and running stats
  std::vector<NamedArray> velocities;  // optimizer state, by parameter name
  int queue_dim = 0;
  std::vector<float> queue_rows;  // row-major, oldest first
  bool has_bank = false;
  PrototypeBank bank;
};

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);

// Throws IngestError on bad magic, unsupported version, or truncation.
Checkpoint LoadCheckpoint(const std::string &path);

}  // namespace spkcon

#endif  // SPKCON_CHECKPOINT_H_
