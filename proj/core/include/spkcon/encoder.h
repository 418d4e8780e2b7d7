// core/include/spkcon/encoder.h

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

#ifndef SPKCON_ENCODER_H_
#define SPKCON_ENCODER_H_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "spkcon/ops.h"
#include "spkcon/rng.h"
#include "spkcon/tensor.h"

namespace spkcon {

// X-vector style TDNN geometry: five dilated 1-D conv layers over feature
// frames, statistics pooling, a linear embedding layer and a two-layer
// projection head (linear -> BN -> ReLU -> linear -> L2 normalize).
struct TdnnConfig {
  int feat_dim = 30;
  std::array<int, 5> channels{512, 512, 512, 512, 1500};
  std::array<int, 5> kernel{5, 3, 3, 1, 1};
  std::array<int, 5> dilation{1, 2, 3, 1, 1};
  int embed_dim = 512;
  int head_dim = 512;
  // Inputs shorter than this are rejected; must be > ContextFrames().
  int min_frames = 23;

  static TdnnConfig Paper();
  static TdnnConfig Tiny();
  // "tdnn-paper" / "tdnn-tiny"; anything else -> ContractError.
  static TdnnConfig Named(const std::string &name);

  // Total frames consumed by the conv stack: sum of (kernel-1)*dilation.
  int ContextFrames() const;
  int stats_dim() const { return 2 * channels[4]; }
};

// All trainable weights plus batch-norm running statistics. Exists in query
// (theta_q) and key (theta_k) copies; the key copy is created with
// requires_grad=false so its forward passes never record gradient work.
template <typename S>
struct EncoderParamsT {
  TdnnConfig cfg;
  std::array<TensorT<S>, 5> conv_w;      // [c_out, kernel*c_in]
  std::array<TensorT<S>, 5> conv_b;      // [c_out]
  std::array<TensorT<S>, 5> conv_gamma;  // [c_out]
  std::array<TensorT<S>, 5> conv_beta;   // [c_out]
  std::array<BnStatsT<S>, 5> conv_stats;
  TensorT<S> embed_w;  // [stats_dim, embed_dim]
  TensorT<S> embed_b;  // [embed_dim]
  TensorT<S> head_w1;  // [embed_dim, head_dim]
  TensorT<S> head_b1;  // [head_dim]
  TensorT<S> head_gamma, head_beta;  // [head_dim]
  BnStatsT<S> head_stats;
  TensorT<S> head_w2;  // [head_dim, head_dim]
  TensorT<S> head_b2;  // [head_dim]

  static EncoderParamsT Init(const TdnnConfig &cfg, Rng *rng,
                             bool trainable = true);

  // Stable name -> tensor view of every trainable array (not the running
  // stats). Order is fixed and identical across instances of a config.
  std::vector<std::pair<std::string, TensorT<S>>> NamedTensors() const;
  // Running statistic vectors, named for checkpointing.
  std::vector<std::pair<std::string, std::vector<S> *>> NamedStats();

  EncoderParamsT Clone(bool trainable) const;
  void SetRequiresGrad(bool rg);
  void ZeroGrads();
};

template <typename S>
struct EmbeddingPairT {
  TensorT<S> embedding;   // [B, embed_dim], pre-head, used for scoring
  TensorT<S> projection;  // [B, head_dim], unit rows, used in losses
};

// Encodes a batch of [T_i x feat_dim] chunks. Training mode uses batch-norm
// batch statistics (per-chunk over time in the conv stack, over the batch in
// the head) and requires batch >= 2; eval mode normalizes with running
// statistics and accepts batch 1. Throws ContractError on chunks shorter
// than cfg.min_frames or with the wrong width.
template <typename S>
EmbeddingPairT<S> EncodeBatch(const std::vector<TensorT<S>> &chunks,
                              EncoderParamsT<S> *params, bool training);

// theta_k <- m * theta_k + (1 - m) * theta_q elementwise over all trainable
// arrays; batch-norm running statistics are mirrored (copied) from theta_q.
// Shape mismatch -> ContractError.
template <typename S>
void EmaUpdate(EncoderParamsT<S> *theta_k, const EncoderParamsT<S> &theta_q,
               S m);

using EncoderParams = EncoderParamsT<float>;
using EmbeddingPair = EmbeddingPairT<float>;

}  // namespace spkcon

#endif  // SPKCON_ENCODER_H_
