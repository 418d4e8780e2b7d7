// core/include/spkcon/metrics.h

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

#ifndef SPKCON_METRICS_H_
#define SPKCON_METRICS_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spkcon {

// One verification trial: target == 1 means same speaker.
struct Trial {
  int target = 0;
  std::string enroll;
  std::string test;
};

// Text format: one trial per line, "1 enroll_utt test_utt" or
// "0 enroll_utt test_utt". '#' comments and blank lines skipped.
// Malformed lines raise EvalError with the line number.
std::vector<Trial> LoadTrials(const std::string &path);

using EmbeddingMap = std::map<std::string, std::vector<float>>;

struct ScoredTrials {
  std::vector<float> scores;   // cosine similarity per trial
  std::vector<int> targets;    // parallel labels
};

// Scores every trial with the cosine similarity of its two embeddings.
// Missing utterance ids raise EvalError listing every missing id.
ScoredTrials ScoreTrials(const std::vector<Trial> &trials,
                         const EmbeddingMap &embeddings);

struct DcfParams {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
};

struct MetricResult {
  double value = 0.0;
  double threshold = 0.0;
};

// Equal error rate: thresholds swept at midpoints between adjacent distinct
// scores plus accept-all / reject-all sentinels, accept iff score >
// threshold, FAR/FRR crossing located by linear interpolation between the
// bracketing operating points. Needs >= 1 target and >= 1 nontarget trial
// (ContractError otherwise).
MetricResult Eer(const ScoredTrials &scored);

// Minimum normalized detection cost over the same threshold sweep:
// min over t of (c_miss p_t P_miss(t) + c_fa (1 - p_t) P_fa(t)) divided by
// min(c_miss p_t, c_fa (1 - p_t)).
MetricResult MinDcf(const ScoredTrials &scored, const DcfParams &params = {});

// Binary embedding archive: magic "SPKE", u32 record count, u32 dim, then
// per record u32 id length, id bytes, dim little-endian f32 values.
// Exporting zero records is a ContractError.
void ExportEmbeddings(const EmbeddingMap &embeddings, const std::string &path);
EmbeddingMap ImportEmbeddings(const std::string &path);

}  // namespace spkcon

#endif  // SPKCON_METRICS_H_
