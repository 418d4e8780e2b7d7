// core/include/spkcon/optim.h

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

#ifndef SPKCON_OPTIM_H_
#define SPKCON_OPTIM_H_

#include <map>
#include <string>
#include <vector>

#include "spkcon/tensor.h"

namespace spkcon {

// A named reference to a trainable leaf tensor.  The handle shares storage
// with the owning model, so in-place updates through it are visible there.
struct NamedParam {
  std::string name;
  Tensor tensor;
};

// Classic SGD with momentum:  v <- m * v + g;  p <- p - lr * v.
// Velocity buffers are keyed by parameter name and created lazily at zero;
// they are exposed so checkpoints can save and restore them.
class SgdMomentum {
 public:
  explicit SgdMomentum(float momentum = 0.9f) : momentum_(momentum) {}

  // Applies one update to every parameter that has a gradient.  Parameters
  // whose grad buffer is missing (never touched by backward) are skipped.
  // Throws TrainError naming the parameter if any gradient is non-finite.
  void Step(const std::vector<NamedParam> &params, float lr);

  float momentum() const { return momentum_; }
  std::map<std::string, std::vector<float>> &velocities() {
    return velocities_;
  }
  const std::map<std::string, std::vector<float>> &velocities() const {
    return velocities_;
  }

 private:
  float momentum_;
  std::map<std::string, std::vector<float>> velocities_;
};

// Cosine decay from lr_max at step 0 to lr_min at step total:
//   lr(t) = lr_min + 0.5 * (lr_max - lr_min) * (1 + cos(pi * t / total))
// Throws ContractError if total <= 0 or t is outside [0, total].
float CosineLr(int64_t t, int64_t total, float lr_max, float lr_min);

}  // namespace spkcon

#endif  // SPKCON_OPTIM_H_
