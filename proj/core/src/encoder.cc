// core/src/encoder.cc

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

#include "spkcon/encoder.h"

#include <cmath>
#include <cstdint>

#include "spkcon/common.h"

namespace spkcon {

TdnnConfig TdnnConfig::Paper() { return TdnnConfig{}; }

TdnnConfig TdnnConfig::Tiny() {
  TdnnConfig cfg;
  cfg.channels = {32, 32, 32, 32, 96};
  cfg.embed_dim = 128;
  cfg.head_dim = 128;
  return cfg;
}

TdnnConfig TdnnConfig::Named(const std::string &name) {
  if (name == "tdnn-paper") return Paper();
  if (name == "tdnn-tiny") return Tiny();
  throw ContractError("unknown encoder architecture '" + name +
                      "' (expected tdnn-paper or tdnn-tiny)");
}

int TdnnConfig::ContextFrames() const {
  int total = 0;
  for (size_t i = 0; i < kernel.size(); ++i)
    total += (kernel[i] - 1) * dilation[i];
  return total;
}

namespace {

template <typename S>
TensorT<S> InitMatrix(int rows, int cols, int fan_in, Rng *rng,
                      bool trainable) {
  // He-style init: layers feed ReLUs, so scale by sqrt(2 / fan_in).
  const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
  TensorT<S> t = TensorT<S>::Zeros({rows, cols}, trainable);
  for (S &v : t.values()) v = static_cast<S>(rng->Normal() * std_dev);
  return t;
}

template <typename S>
TensorT<S> InitVector(int n, S fill, bool trainable) {
  return TensorT<S>::Full({n}, fill, trainable);
}

}  // namespace

template <typename S>
EncoderParamsT<S> EncoderParamsT<S>::Init(const TdnnConfig &cfg, Rng *rng,
                                          bool trainable) {
  EncoderParamsT<S> p;
  p.cfg = cfg;
  int c_in = cfg.feat_dim;
  for (int l = 0; l < 5; ++l) {
    const int c_out = cfg.channels[l];
    const int fan_in = cfg.kernel[l] * c_in;
    p.conv_w[l] = InitMatrix<S>(c_out, fan_in, fan_in, rng, trainable);
    p.conv_b[l] = InitVector<S>(c_out, S(0), trainable);
    p.conv_gamma[l] = InitVector<S>(c_out, S(1), trainable);
    p.conv_beta[l] = InitVector<S>(c_out, S(0), trainable);
    p.conv_stats[l] = BnStatsT<S>(c_out);
    c_in = c_out;
  }
  p.embed_w = InitMatrix<S>(cfg.stats_dim(), cfg.embed_dim, cfg.stats_dim(),
                            rng, trainable);
  p.embed_b = InitVector<S>(cfg.embed_dim, S(0), trainable);
  p.head_w1 = InitMatrix<S>(cfg.embed_dim, cfg.head_dim, cfg.embed_dim, rng,
                            trainable);
  p.head_b1 = InitVector<S>(cfg.head_dim, S(0), trainable);
  p.head_gamma = InitVector<S>(cfg.head_dim, S(1), trainable);
  p.head_beta = InitVector<S>(cfg.head_dim, S(0), trainable);
  p.head_stats = BnStatsT<S>(cfg.head_dim);
  p.head_w2 = InitMatrix<S>(cfg.head_dim, cfg.head_dim, cfg.head_dim, rng,
                            trainable);
  p.head_b2 = InitVector<S>(cfg.head_dim, S(0), trainable);
  return p;
}

template <typename S>
std::vector<std::pair<std::string, TensorT<S>>>
EncoderParamsT<S>::NamedTensors() const {
  std::vector<std::pair<std::string, TensorT<S>>> out;
  for (int l = 0; l < 5; ++l) {
    const std::string base = "conv" + std::to_string(l + 1);
    out.emplace_back(base + ".weight", conv_w[l]);
    out.emplace_back(base + ".bias", conv_b[l]);
    out.emplace_back(base + ".bn.gamma", conv_gamma[l]);
    out.emplace_back(base + ".bn.beta", conv_beta[l]);
  }
  out.emplace_back("embed.weight", embed_w);
  out.emplace_back("embed.bias", embed_b);
  out.emplace_back("head.fc1.weight", head_w1);
  out.emplace_back("head.fc1.bias", head_b1);
  out.emplace_back("head.bn.gamma", head_gamma);
  out.emplace_back("head.bn.beta", head_beta);
  out.emplace_back("head.fc2.weight", head_w2);
  out.emplace_back("head.fc2.bias", head_b2);
  return out;
}

template <typename S>
std::vector<std::pair<std::string, std::vector<S> *>>
EncoderParamsT<S>::NamedStats() {
  std::vector<std::pair<std::string, std::vector<S> *>> out;
  for (int l = 0; l < 5; ++l) {
    const std::string base = "conv" + std::to_string(l + 1) + ".bn";
    out.emplace_back(base + ".running_mean", &conv_stats[l].running_mean);
    out.emplace_back(base + ".running_var", &conv_stats[l].running_var);
  }
  out.emplace_back("head.bn.running_mean", &head_stats.running_mean);
  out.emplace_back("head.bn.running_var", &head_stats.running_var);
  return out;
}

template <typename S>
EncoderParamsT<S> EncoderParamsT<S>::Clone(bool trainable) const {
  EncoderParamsT<S> c;
  c.cfg = cfg;
  auto copy = [trainable](const TensorT<S> &src) {
    TensorT<S> dst = TensorT<S>::FromData(src.shape(), src.values(), trainable);
    return dst;
  };
  for (int l = 0; l < 5; ++l) {
    c.conv_w[l] = copy(conv_w[l]);
    c.conv_b[l] = copy(conv_b[l]);
    c.conv_gamma[l] = copy(conv_gamma[l]);
    c.conv_beta[l] = copy(conv_beta[l]);
    c.conv_stats[l] = conv_stats[l];
  }
  c.embed_w = copy(embed_w);
  c.embed_b = copy(embed_b);
  c.head_w1 = copy(head_w1);
  c.head_b1 = copy(head_b1);
  c.head_gamma = copy(head_gamma);
  c.head_beta = copy(head_beta);
  c.head_stats = head_stats;
  c.head_w2 = copy(head_w2);
  c.head_b2 = copy(head_b2);
  return c;
}

template <typename S>
void EncoderParamsT<S>::SetRequiresGrad(bool rg) {
  for (auto &[name, t] : NamedTensors()) {
    (void)name;
    t.SetRequiresGrad(rg);
  }
}

template <typename S>
void EncoderParamsT<S>::ZeroGrads() {
  for (auto &[name, t] : NamedTensors()) {
    (void)name;
    t.ZeroGrad();
  }
}

template <typename S>
EmbeddingPairT<S> EncodeBatch(const std::vector<TensorT<S>> &chunks,
                              EncoderParamsT<S> *params, bool training) {
  if (params == nullptr) throw ContractError("encode: null params");
  const TdnnConfig &cfg = params->cfg;
  if (chunks.empty()) throw ContractError("encode: empty batch");
  if (training && chunks.size() < 2)
    throw ContractError(
        "encode: training mode needs batch >= 2 for head batch-norm, got " +
        std::to_string(chunks.size()));
  std::vector<TensorT<S>> pooled;
  pooled.reserve(chunks.size());
  for (const TensorT<S> &chunk : chunks) {
    if (chunk.rank() != 2 || chunk.cols() != cfg.feat_dim)
      throw ContractError("encode: chunk must be [T x " +
                          std::to_string(cfg.feat_dim) + "]");
    if (chunk.rows() < cfg.min_frames)
      throw ContractError("encode: chunk has " + std::to_string(chunk.rows()) +
                          " frames, need at least " +
                          std::to_string(cfg.min_frames));
    TensorT<S> x = chunk;
    for (int l = 0; l < 5; ++l) {
      x = Conv1d(x, params->conv_w[l], params->conv_b[l], cfg.kernel[l],
                 cfg.dilation[l]);
      // Conv BN normalizes over this chunk's time axis.
      x = BatchNorm(x, params->conv_gamma[l], params->conv_beta[l],
                    &params->conv_stats[l], training);
      x = Relu(x);
    }
    pooled.push_back(StatsPool(x));  // [2 * channels[4]]
  }
  TensorT<S> stats = ConcatRows(pooled);  // [B, stats_dim]
  TensorT<S> embed = AddRow(Matmul(stats, params->embed_w), params->embed_b);
  TensorT<S> h = AddRow(Matmul(embed, params->head_w1), params->head_b1);
  h = BatchNorm(h, params->head_gamma, params->head_beta, &params->head_stats,
                training);
  h = Relu(h);
  TensorT<S> proj =
      L2NormalizeRows(AddRow(Matmul(h, params->head_w2), params->head_b2));
  return EmbeddingPairT<S>{embed, proj};
}

template <typename S>
void EmaUpdate(EncoderParamsT<S> *theta_k, const EncoderParamsT<S> &theta_q,
               S m) {
  if (theta_k == nullptr) throw ContractError("ema: null key params");
  auto k_named = theta_k->NamedTensors();
  auto q_named = theta_q.NamedTensors();
  if (k_named.size() != q_named.size())
    throw ContractError("ema: parameter sets differ in size");
  for (size_t i = 0; i < k_named.size(); ++i) {
    TensorT<S> &kt = k_named[i].second;
    const TensorT<S> &qt = q_named[i].second;
    if (kt.shape() != qt.shape())
      throw ContractError("ema: shape mismatch for parameter " +
                          k_named[i].first);
    std::vector<S> &kv = kt.values();
    const std::vector<S> &qv = qt.values();
    for (size_t j = 0; j < kv.size(); ++j)
      kv[j] = m * kv[j] + (S(1) - m) * qv[j];
  }
  // Running stats are not momentum-averaged; the key encoder mirrors the
  // query encoder's statistics so its eval-mode BN stays in sync.
  auto k_stats = theta_k->NamedStats();
  auto q_stats = const_cast<EncoderParamsT<S> &>(theta_q).NamedStats();
  for (size_t i = 0; i < k_stats.size(); ++i) {
    if (k_stats[i].second->size() != q_stats[i].second->size())
      throw ContractError("ema: running stat shape mismatch for " +
                          k_stats[i].first);
    *k_stats[i].second = *q_stats[i].second;
  }
}

template struct EncoderParamsT<float>;
template struct EncoderParamsT<double>;
template EmbeddingPairT<float> EncodeBatch(const std::vector<TensorT<float>> &,
                                           EncoderParamsT<float> *, bool);
template EmbeddingPairT<double> EncodeBatch(
    const std::vector<TensorT<double>> &, EncoderParamsT<double> *, bool);
template void EmaUpdate(EncoderParamsT<float> *, const EncoderParamsT<float> &,
                        float);
template void EmaUpdate(EncoderParamsT<double> *,
                        const EncoderParamsT<double> &, double);

}  // namespace spkcon
