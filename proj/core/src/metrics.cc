// core/src/metrics.cc

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

#include "spkcon/metrics.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "spkcon/common.h"

namespace spkcon {

static_assert(std::endian::native == std::endian::little,
              "embedding archives are little-endian; big-endian hosts are "
              "not supported");

std::vector<Trial> LoadTrials(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw EvalError("cannot open trial list '" + path + "'");
  std::vector<Trial> trials;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string label, enroll, test, extra;
    if (!(fields >> label >> enroll >> test) || (fields >> extra))
      throw EvalError(path + ":" + std::to_string(line_no) +
                      ": expected 'label enroll test'");
    if (label != "0" && label != "1")
      throw EvalError(path + ":" + std::to_string(line_no) +
                      ": trial label must be 0 or 1, got '" + label + "'");
    trials.push_back(Trial{label == "1" ? 1 : 0, enroll, test});
  }
  if (trials.empty()) throw EvalError("trial list '" + path + "' is empty");
  return trials;
}

ScoredTrials ScoreTrials(const std::vector<Trial> &trials,
                         const EmbeddingMap &embeddings) {
  std::set<std::string> missing;
  for (const Trial &t : trials) {
    if (embeddings.find(t.enroll) == embeddings.end()) missing.insert(t.enroll);
    if (embeddings.find(t.test) == embeddings.end()) missing.insert(t.test);
  }
  if (!missing.empty()) {
    std::string msg = "trials reference utterances with no embedding:";
    for (const std::string &id : missing) msg += " " + id;
    throw EvalError(msg);
  }
  ScoredTrials out;
  out.scores.reserve(trials.size());
  out.targets.reserve(trials.size());
  for (const Trial &t : trials) {
    const std::vector<float> &a = embeddings.at(t.enroll);
    const std::vector<float> &b = embeddings.at(t.test);
    if (a.size() != b.size())
      throw EvalError("embedding dim mismatch between '" + t.enroll +
                      "' and '" + t.test + "'");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
      dot += static_cast<double>(a[i]) * b[i];
      na += static_cast<double>(a[i]) * a[i];
      nb += static_cast<double>(b[i]) * b[i];
    }
    out.scores.push_back(
        static_cast<float>(dot / std::max(std::sqrt(na * nb), 1e-12)));
    out.targets.push_back(t.target);
  }
  return out;
}

namespace {

// Operating points of the "accept iff score > threshold" detector, swept
// over midpoints between adjacent distinct scores plus accept-all and
// reject-all sentinels. misses/false-alarms are exact trial counts.
struct Sweep {
  std::vector<double> thresholds;
  std::vector<int64_t> misses;        // targets with score <= threshold
  std::vector<int64_t> false_alarms;  // nontargets with score > threshold
  int64_t num_targets = 0;
  int64_t num_nontargets = 0;
};

Sweep BuildSweep(const ScoredTrials &scored) {
  if (scored.scores.size() != scored.targets.size())
    throw ContractError("scored trials have mismatched lengths");
  Sweep sweep;
  std::vector<std::pair<float, int>> pairs;
  pairs.reserve(scored.scores.size());
  for (size_t i = 0; i < scored.scores.size(); ++i) {
    pairs.emplace_back(scored.scores[i], scored.targets[i]);
    if (scored.targets[i] == 1)
      ++sweep.num_targets;
    else
      ++sweep.num_nontargets;
  }
  if (sweep.num_targets < 1 || sweep.num_nontargets < 1)
    throw ContractError(
        "metrics need at least one target and one nontarget trial");
  std::sort(pairs.begin(), pairs.end());
  // Distinct scores with cumulative target / nontarget counts at <= score.
  std::vector<float> distinct;
  std::vector<int64_t> cum_t, cum_n;
  int64_t t = 0, n = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].second == 1)
      ++t;
    else
      ++n;
    if (i + 1 == pairs.size() || pairs[i + 1].first != pairs[i].first) {
      distinct.push_back(pairs[i].first);
      cum_t.push_back(t);
      cum_n.push_back(n);
    }
  }
  const size_t m = distinct.size();
  sweep.thresholds.push_back(static_cast<double>(distinct.front()) - 1.0);
  sweep.misses.push_back(0);
  sweep.false_alarms.push_back(sweep.num_nontargets);
  for (size_t j = 0; j + 1 < m; ++j) {
    sweep.thresholds.push_back(
        0.5 * (static_cast<double>(distinct[j]) + distinct[j + 1]));
    sweep.misses.push_back(cum_t[j]);
    sweep.false_alarms.push_back(sweep.num_nontargets - cum_n[j]);
  }
  sweep.thresholds.push_back(static_cast<double>(distinct.back()) + 1.0);
  sweep.misses.push_back(sweep.num_targets);
  sweep.false_alarms.push_back(0);
  return sweep;
}

}  // namespace

MetricResult Eer(const ScoredTrials &scored) {
  const Sweep sweep = BuildSweep(scored);
  const double nt = static_cast<double>(sweep.num_targets);
  const double nn = static_cast<double>(sweep.num_nontargets);
  // Walk thresholds upward: FRR rises from 0, FAR falls from 1. Find the
  // first index where FRR >= FAR; the crossing lies at or just before it.
  for (size_t j = 0; j < sweep.thresholds.size(); ++j) {
    const int64_t miss = sweep.misses[j];
    const int64_t fa = sweep.false_alarms[j];
    // Exact rational comparison: miss/nt >= fa/nn.
    if (miss * sweep.num_nontargets < fa * sweep.num_targets) continue;
    if (miss * sweep.num_nontargets == fa * sweep.num_targets)
      return MetricResult{static_cast<double>(miss) / nt, sweep.thresholds[j]};
    // Strict crossing between j-1 and j: interpolate linearly.
    const double a1 = static_cast<double>(sweep.false_alarms[j - 1]) / nn;
    const double r1 = static_cast<double>(sweep.misses[j - 1]) / nt;
    const double a2 = static_cast<double>(fa) / nn;
    const double r2 = static_cast<double>(miss) / nt;
    const double frac = (a1 - r1) / ((a1 - r1) + (r2 - a2));
    return MetricResult{
        a1 + frac * (a2 - a1),
        sweep.thresholds[j - 1] +
            frac * (sweep.thresholds[j] - sweep.thresholds[j - 1])};
  }
  throw ContractError("no FAR/FRR crossing found");  // unreachable
}

MetricResult MinDcf(const ScoredTrials &scored, const DcfParams &params) {
  if (params.p_target <= 0.0 || params.p_target >= 1.0)
    throw ContractError("p_target must lie in (0, 1)");
  const Sweep sweep = BuildSweep(scored);
  const double nt = static_cast<double>(sweep.num_targets);
  const double nn = static_cast<double>(sweep.num_nontargets);
  const double w_miss = params.c_miss * params.p_target;
  const double w_fa = params.c_fa * (1.0 - params.p_target);
  const double norm = std::min(w_miss, w_fa);
  MetricResult best{0.0, 0.0};
  bool first = true;
  for (size_t j = 0; j < sweep.thresholds.size(); ++j) {
    const double cost = w_miss * (static_cast<double>(sweep.misses[j]) / nt) +
                        w_fa * (static_cast<double>(sweep.false_alarms[j]) / nn);
    if (first || cost < best.value) {
      best = MetricResult{cost, sweep.thresholds[j]};
      first = false;
    }
  }
  best.value /= norm;
  return best;
}

namespace {

void WriteU32(std::ofstream &out, uint32_t v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

uint32_t ReadU32(std::ifstream &in, const std::string &path) {
  uint32_t v = 0;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof v))
    throw EvalError("truncated embedding archive '" + path + "'");
  return v;
}

}  // namespace

void ExportEmbeddings(const EmbeddingMap &embeddings,
                      const std::string &path) {
  if (embeddings.empty())
    throw ContractError("refusing to export an empty embedding set");
  const size_t dim = embeddings.begin()->second.size();
  if (dim == 0) throw ContractError("embeddings have dimension 0");
  for (const auto &[id, vec] : embeddings)
    if (vec.size() != dim)
      throw ContractError("embedding '" + id + "' has dim " +
                          std::to_string(vec.size()) + ", expected " +
                          std::to_string(dim));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw EvalError("cannot write embedding archive '" + path + "'");
  out.write("SPKE", 4);
  WriteU32(out, static_cast<uint32_t>(embeddings.size()));
  WriteU32(out, static_cast<uint32_t>(dim));
  for (const auto &[id, vec] : embeddings) {
    WriteU32(out, static_cast<uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    out.write(reinterpret_cast<const char *>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(float)));
  }
  if (!out) throw EvalError("failed writing embedding archive '" + path + "'");
}

EmbeddingMap ImportEmbeddings(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvalError("cannot open embedding archive '" + path + "'");
  char magic[4] = {};
  if (!in.read(magic, 4) || std::memcmp(magic, "SPKE", 4) != 0)
    throw EvalError("'" + path + "' is not an embedding archive (bad magic)");
  const uint32_t count = ReadU32(in, path);
  const uint32_t dim = ReadU32(in, path);
  if (count == 0) throw EvalError("embedding archive '" + path + "' is empty");
  if (dim == 0 || dim > (1u << 20))
    throw EvalError("embedding archive '" + path + "' has invalid dim " +
                    std::to_string(dim));
  EmbeddingMap out;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t id_len = ReadU32(in, path);
    if (id_len > (1u << 16))
      throw EvalError("embedding archive '" + path + "' has oversized id");
    std::string id(id_len, '\0');
    if (!in.read(id.data(), id_len))
      throw EvalError("truncated embedding archive '" + path + "'");
    std::vector<float> vec(dim);
    if (!in.read(reinterpret_cast<char *>(vec.data()),
                 static_cast<std::streamsize>(dim * sizeof(float))))
      throw EvalError("truncated embedding archive '" + path + "'");
    if (!out.emplace(std::move(id), std::move(vec)).second)
      throw EvalError("duplicate utterance id in embedding archive '" + path +
                      "'");
  }
  return out;
}

}  // namespace spkcon
