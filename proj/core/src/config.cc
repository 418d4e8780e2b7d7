// core/src/config.cc

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

#include "spkcon/config.h"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "spkcon/common.h"

namespace spkcon {

LossKind ParseLossKind(const std::string &name) {
  if (name == "simclr") return LossKind::kSimclr;
  if (name == "moco") return LossKind::kMoco;
  if (name == "proto") return LossKind::kProto;
  if (name == "semi") return LossKind::kSemi;
  throw ContractError("unknown loss kind '" + name +
                      "' (expected simclr, moco, proto or semi)");
}

std::string LossKindName(LossKind kind) {
  switch (kind) {
    case LossKind::kSimclr: return "simclr";
    case LossKind::kMoco: return "moco";
    case LossKind::kProto: return "proto";
    case LossKind::kSemi: return "semi";
  }
  throw ContractError("invalid loss kind value");
}

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool ParseBool(const std::string &v, const std::string &where) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ContractError(where + ": expected a boolean, got '" + v + "'");
}

int ParseInt(const std::string &v, const std::string &where) {
  try {
    size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception &) {
    throw ContractError(where + ": expected an integer, got '" + v + "'");
  }
}

uint64_t ParseU64(const std::string &v, const std::string &where) {
  try {
    size_t pos = 0;
    const unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<uint64_t>(out);
  } catch (const std::exception &) {
    throw ContractError(where + ": expected an unsigned integer, got '" + v +
                        "'");
  }
}

double ParseDouble(const std::string &v, const std::string &where) {
  try {
    size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception &) {
    throw ContractError(where + ": expected a number, got '" + v + "'");
  }
}

using Setter = std::function<void(RunConfig &, const std::string &value,
                                  const std::string &where)>;

const std::map<std::string, Setter> &KeyTable() {
  static const std::map<std::string, Setter> table = {
      {"train_manifest",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.train_manifest = v;
       }},
      {"aug_manifest",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.aug_manifest = v;
       }},
      {"eval_manifest",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.eval_manifest = v;
       }},
      {"trials",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.trials = v;
       }},
      {"out_dir",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.out_dir = v;
       }},
      {"arch",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.arch = v;
       }},
      {"loss.kind",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.loss = ParseLossKind(v);
       }},
      {"loss.tau",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.tau = ParseDouble(v, w);
       }},
      {"loss.lambda",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.lambda = ParseDouble(v, w);
       }},
      {"loss.alpha",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.alpha = ParseDouble(v, w);
       }},
      {"queue.size",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.queue_size = ParseInt(v, w);
       }},
      {"ema.momentum",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.ema_momentum = ParseDouble(v, w);
       }},
      {"proto.clusters",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.clusters = ParseInt(v, w);
       }},
      {"proto.negatives",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.proto_negatives = ParseInt(v, w);
       }},
      {"proto.warmup_epochs",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.warmup_epochs = ParseInt(v, w);
       }},
      {"proto.cluster_every",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.cluster_every = ParseInt(v, w);
       }},
      {"epochs",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.epochs = ParseInt(v, w);
       }},
      {"batch_size",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.batch_size = ParseInt(v, w);
       }},
      {"lr.start",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.lr_start = ParseDouble(v, w);
       }},
      {"lr.end",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.lr_end = ParseDouble(v, w);
       }},
      {"sgd.momentum",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.momentum = ParseDouble(v, w);
       }},
      {"labeled_fraction",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.labeled_fraction = ParseDouble(v, w);
       }},
      {"augment.wav",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.wav_aug = ParseBool(v, w);
       }},
      {"augment.spec",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.spec_aug = ParseBool(v, w);
       }},
      {"chunk.min",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.chunk_min = ParseInt(v, w);
       }},
      {"chunk.max",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.chunk_max = ParseInt(v, w);
       }},
      {"seed",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.seed = ParseU64(v, w);
       }},
      {"checkpoints.keep",
       [](RunConfig &c, const std::string &v, const std::string &w) {
         c.keep_checkpoints = ParseInt(v, w);
       }},
      {"resume",
       [](RunConfig &c, const std::string &v, const std::string &) {
         c.resume = v;
       }},
  };
  return table;
}

void Validate(const RunConfig &c) {
  if (c.tau <= 0.0) throw ContractError("loss.tau must be positive");
  if (c.queue_size < 1) throw ContractError("queue.size must be >= 1");
  if (c.ema_momentum < 0.0 || c.ema_momentum > 1.0)
    throw ContractError("ema.momentum must lie in [0, 1]");
  if (c.batch_size < 2) throw ContractError("batch_size must be >= 2");
  if (c.epochs < 1) throw ContractError("epochs must be >= 1");
  if (c.clusters < 1) throw ContractError("proto.clusters must be >= 1");
  if (c.proto_negatives < 1)
    throw ContractError("proto.negatives must be >= 1");
  if (c.warmup_epochs < 0)
    throw ContractError("proto.warmup_epochs must be >= 0");
  if (c.cluster_every < 1)
    throw ContractError("proto.cluster_every must be >= 1");
  if (c.labeled_fraction < 0.0 || c.labeled_fraction > 1.0)
    throw ContractError("labeled_fraction must lie in [0, 1]");
  if (c.chunk_min < 1 || c.chunk_max < c.chunk_min)
    throw ContractError("chunk.min/chunk.max must satisfy 1 <= min <= max");
  if (c.lr_start <= 0.0 || c.lr_end < 0.0)
    throw ContractError("learning rates must be positive");
  if (c.momentum < 0.0 || c.momentum >= 1.0)
    throw ContractError("sgd.momentum must lie in [0, 1)");
  if (c.keep_checkpoints < 1)
    throw ContractError("checkpoints.keep must be >= 1");
}

void ApplySeedEnv(RunConfig *cfg) {
  const char *env = std::getenv("SPKCON_SEED");
  if (env == nullptr || *env == '\0') return;
  cfg->seed = ParseU64(env, "SPKCON_SEED");
  LogInfo(fmt::format("seed overridden by SPKCON_SEED={}", cfg->seed));
}

}  // namespace

RunConfig ParseRunConfig(const std::string &text, bool apply_env) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "config line " + std::to_string(line_no);
    std::string s = Trim(line);
    if (s.empty() || s[0] == '#') continue;
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ContractError(where + ": expected key=value, got '" + s + "'");
    const std::string key = Trim(s.substr(0, eq));
    const std::string value = Trim(s.substr(eq + 1));
    if (key.empty()) throw ContractError(where + ": empty key");
    const auto it = KeyTable().find(key);
    if (it == KeyTable().end())
      throw ContractError(where + ": unknown key '" + key + "'");
    it->second(cfg, value, where + " (" + key + ")");
  }
  if (apply_env) ApplySeedEnv(&cfg);
  Validate(cfg);
  return cfg;
}

RunConfig LoadRunConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseRunConfig(buf.str());
}

std::string FormatRunConfig(const RunConfig &c) {
  std::string out;
  out += fmt::format("train_manifest = {}\n", c.train_manifest);
  out += fmt::format("aug_manifest = {}\n", c.aug_manifest);
  out += fmt::format("eval_manifest = {}\n", c.eval_manifest);
  out += fmt::format("trials = {}\n", c.trials);
  out += fmt::format("out_dir = {}\n", c.out_dir);
  out += fmt::format("arch = {}\n", c.arch);
  out += fmt::format("loss.kind = {}\n", LossKindName(c.loss));
  out += fmt::format("loss.tau = {}\n", c.tau);
  out += fmt::format("loss.lambda = {}\n", c.lambda);
  out += fmt::format("loss.alpha = {}\n", c.alpha);
  out += fmt::format("queue.size = {}\n", c.queue_size);
  out += fmt::format("ema.momentum = {}\n", c.ema_momentum);
  out += fmt::format("proto.clusters = {}\n", c.clusters);
  out += fmt::format("proto.negatives = {}\n", c.proto_negatives);
  out += fmt::format("proto.warmup_epochs = {}\n", c.warmup_epochs);
  out += fmt::format("proto.cluster_every = {}\n", c.cluster_every);
  out += fmt::format("epochs = {}\n", c.epochs);
  out += fmt::format("batch_size = {}\n", c.batch_size);
  out += fmt::format("lr.start = {}\n", c.lr_start);
  out += fmt::format("lr.end = {}\n", c.lr_end);
  out += fmt::format("sgd.momentum = {}\n", c.momentum);
  out += fmt::format("labeled_fraction = {}\n", c.labeled_fraction);
  out += fmt::format("augment.wav = {}\n", c.wav_aug ? "true" : "false");
  out += fmt::format("augment.spec = {}\n", c.spec_aug ? "true" : "false");
  out += fmt::format("chunk.min = {}\n", c.chunk_min);
  out += fmt::format("chunk.max = {}\n", c.chunk_max);
  out += fmt::format("seed = {}\n", c.seed);
  out += fmt::format("checkpoints.keep = {}\n", c.keep_checkpoints);
  if (!c.resume.empty()) out += fmt::format("resume = {}\n", c.resume);
  return out;
}

void WriteRunConfig(const std::string &path, const RunConfig &cfg) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write config '" + path + "'");
  out << FormatRunConfig(cfg);
  if (!out) throw IngestError("failed writing config '" + path + "'");
}

}  // namespace spkcon
