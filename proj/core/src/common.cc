// core/src/common.cc

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

#include "spkcon/common.h"

#include <cstdio>

namespace spkcon {

void LogInfo(const std::string &msg) {
  std::fprintf(stderr, "[spkcon] I %s\n", msg.c_str());
}

void LogWarn(const std::string &msg) {
  std::fprintf(stderr, "[spkcon] W %s\n", msg.c_str());
}

}  // namespace spkcon
