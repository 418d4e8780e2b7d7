// core/src/optim.cc

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

#include "spkcon/optim.h"

#include <fmt/format.h>

#include <cmath>

#include "spkcon/common.h"

namespace spkcon {

void SgdMomentum::Step(const std::vector<NamedParam> &params, float lr) {
  for (const auto &p : params) {
    if (!p.tensor.has_grad()) continue;
    const std::vector<float> &g = p.tensor.grad();
    for (float gv : g) {
      if (!std::isfinite(gv)) {
        throw TrainError(
            fmt::format("non-finite gradient in parameter '{}'", p.name));
      }
    }
    std::vector<float> &v = velocities_[p.name];
    if (v.empty()) v.assign(g.size(), 0.0f);
    if (v.size() != g.size()) {
      throw TrainError(fmt::format(
          "velocity size {} does not match gradient size {} for '{}'",
          v.size(), g.size(), p.name));
    }
    std::vector<float> &w = p.tensor.raw()->values;
    for (size_t i = 0; i < g.size(); ++i) {
      v[i] = momentum_ * v[i] + g[i];
      w[i] -= lr * v[i];
    }
  }
}

float CosineLr(int64_t t, int64_t total, float lr_max, float lr_min) {
  if (total <= 0) {
    throw ContractError(
        fmt::format("cosine_lr: total steps must be positive, got {}", total));
  }
  if (t < 0 || t > total) {
    throw ContractError(
        fmt::format("cosine_lr: step {} outside [0, {}]", t, total));
  }
  double frac = static_cast<double>(t) / static_cast<double>(total);
  return static_cast<float>(
      lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(M_PI * frac)));
}

}  // namespace spkcon
