// core/src/rng.cc

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

#include "spkcon/rng.h"

#include <cmath>

#include "spkcon/common.h"

namespace spkcon {

uint64_t Rng::Mix(uint64_t h, uint64_t v) {
  // splitmix64 finalizer over h ^ v.
  uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t Rng::MixString(uint64_t h, const std::string &s) {
  for (unsigned char c : s) h = Mix(h, c);
  return Mix(h, s.size());
}

double Rng::Uniform() {
  // Top 53 bits -> double in [0, 1).
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double Rng::Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

int64_t Rng::UniformInt(int64_t n) {
  if (n <= 0) throw ContractError("Rng::UniformInt: n must be positive");
  // Rejection sampling keeps the draw exactly uniform.
  uint64_t un = static_cast<uint64_t>(n);
  uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return static_cast<int64_t>(x % un);
}

int64_t Rng::UniformIntRange(int64_t lo, int64_t hi) {
  if (hi < lo) throw ContractError("Rng::UniformIntRange: empty range");
  return lo + UniformInt(hi - lo + 1);
}

double Rng::Normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1, u2;
  do {
    u1 = Uniform();
  } while (u1 <= 0.0);
  u2 = Uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

uint64_t DeriveSeed(uint64_t master, const std::string &tag, uint64_t a,
                    uint64_t b, uint64_t c) {
  uint64_t h = Rng::Mix(0x53504b43ULL, master);  // "SPKC"
  h = Rng::MixString(h, tag);
  h = Rng::Mix(h, a);
  h = Rng::Mix(h, b);
  h = Rng::Mix(h, c);
  return h;
}

}  // namespace spkcon
