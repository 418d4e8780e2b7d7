// core/include/spkcon/common.h

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

#ifndef SPKCON_COMMON_H_
#define SPKCON_COMMON_H_

#include <stdexcept>
#include <string>

namespace spkcon {

// Error taxonomy. Every failure surfaced by the library is one of these, so
// callers can distinguish bad input files from contract violations.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Tensor shapes do not line up for the requested operation.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string &msg) : Error(msg) {}
};

// A documented precondition of an operation was violated.
class ContractError : public Error {
 public:
  explicit ContractError(const std::string &msg) : Error(msg) {}
};

// A data file could not be ingested (wrong encoding, rate, channels, ...).
class IngestError : public Error {
 public:
  explicit IngestError(const std::string &msg) : Error(msg) {}
};

// Feature extraction could not produce usable frames.
class FrontendError : public Error {
 public:
  explicit FrontendError(const std::string &msg) : Error(msg) {}
};

class AugmentError : public Error {
 public:
  explicit AugmentError(const std::string &msg) : Error(msg) {}
};

class TrainError : public Error {
 public:
  explicit TrainError(const std::string &msg) : Error(msg) {}
};

class EvalError : public Error {
 public:
  explicit EvalError(const std::string &msg) : Error(msg) {}
};

class ClusterError : public Error {
 public:
  explicit ClusterError(const std::string &msg) : Error(msg) {}
};

// stderr logging; keeps the metrics log (see trainer) free of chatter.
void LogInfo(const std::string &msg);
void LogWarn(const std::string &msg);

}  // namespace spkcon

#endif  // SPKCON_COMMON_H_
