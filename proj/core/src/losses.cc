// core/src/losses.cc

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

#include "spkcon/losses.h"

#include <cmath>
#include <string>

#include "spkcon/common.h"
#include "spkcon/ops.h"

namespace spkcon {

namespace {

// Additive mask value: exp(x + kMaskValue) underflows to exactly 0 for any
// realistic similarity, removing self-pairs from log-sum-exp denominators.
constexpr double kMaskValue = -1e30;

template <typename S>
void RequireProjections(const TensorT<S> &t, const char *what) {
  if (!t.defined() || t.rank() != 2)
    throw ContractError(std::string(what) + " must be a [N x D] matrix");
  if (t.rows() < 1) throw ContractError(std::string(what) + " is empty");
}

}  // namespace

NegativeQueue::NegativeQueue(int capacity) : capacity_(capacity) {
  if (capacity < 1)
    throw ContractError("negative queue capacity must be >= 1, got " +
                        std::to_string(capacity));
}

void NegativeQueue::Push(const std::vector<float> &row) {
  if (row.empty()) throw ContractError("queue push: empty row");
  if (dim_ == 0) dim_ = static_cast<int>(row.size());
  if (static_cast<int>(row.size()) != dim_)
    throw ContractError("queue push: row dim " + std::to_string(row.size()) +
                        " != queue dim " + std::to_string(dim_));
  double sq = 0.0;
  for (float v : row) sq += static_cast<double>(v) * v;
  const double norm = std::sqrt(sq);
  if (std::abs(norm - 1.0) > 1e-5)
    throw ContractError("queue push: row norm " + std::to_string(norm) +
                        " violates unit-norm contract");
  rows_.push_back(row);
  if (static_cast<int>(rows_.size()) > capacity_) rows_.pop_front();
}

void NegativeQueue::PushRows(const Tensor &rows) {
  if (!rows.defined() || rows.rank() != 2)
    throw ContractError("queue push: expected [B x D] tensor");
  const std::vector<float> &v = rows.values();
  const int d = rows.cols();
  for (int i = 0; i < rows.rows(); ++i)
    Push(std::vector<float>(v.begin() + i * d, v.begin() + (i + 1) * d));
}

Tensor NegativeQueue::Snapshot() const {
  if (rows_.empty()) return Tensor();
  std::vector<float> flat;
  flat.reserve(rows_.size() * dim_);
  for (const auto &r : rows_) flat.insert(flat.end(), r.begin(), r.end());
  return Tensor::FromData({size(), dim_}, std::move(flat));
}

std::vector<float> NegativeQueue::Flatten() const {
  std::vector<float> flat;
  flat.reserve(rows_.size() * dim_);
  for (const auto &r : rows_) flat.insert(flat.end(), r.begin(), r.end());
  return flat;
}

void NegativeQueue::Restore(int dim, const std::vector<float> &flat) {
  if (dim <= 0) {
    if (!flat.empty())
      throw ContractError("queue restore: dim 0 with nonempty data");
    rows_.clear();
    dim_ = 0;
    return;
  }
  if (flat.size() % dim != 0)
    throw ContractError("queue restore: data size not a multiple of dim");
  const int n = static_cast<int>(flat.size()) / dim;
  if (n > capacity_)
    throw ContractError("queue restore: " + std::to_string(n) +
                        " rows exceed capacity " + std::to_string(capacity_));
  rows_.clear();
  dim_ = dim;
  for (int i = 0; i < n; ++i)
    rows_.emplace_back(flat.begin() + i * dim, flat.begin() + (i + 1) * dim);
}

template <typename S>
TensorT<S> SimclrLoss(const TensorT<S> &va, const TensorT<S> &vb, S tau) {
  RequireProjections(va, "simclr: va");
  RequireProjections(vb, "simclr: vb");
  if (va.shape() != vb.shape())
    throw ContractError("simclr: view shapes differ");
  if (tau <= S(0)) throw ContractError("simclr: tau must be positive");
  const int n = va.rows();
  TensorT<S> z = ConcatRows<S>({va, vb});                        // [2N x D]
  TensorT<S> sims = Scale(Matmul(va, Transpose(z)), S(1) / tau);  // [N x 2N]
  // Mask each anchor's similarity to itself (column i of row i).
  std::vector<S> mask(static_cast<size_t>(n) * 2 * n, S(0));
  std::vector<S> pos_sel(static_cast<size_t>(n) * 2 * n, S(0));
  for (int i = 0; i < n; ++i) {
    mask[static_cast<size_t>(i) * 2 * n + i] = static_cast<S>(kMaskValue);
    pos_sel[static_cast<size_t>(i) * 2 * n + n + i] = S(1);
  }
  TensorT<S> masked =
      Add(sims, TensorT<S>::FromData({n, 2 * n}, std::move(mask)));
  TensorT<S> pos =
      RowSum(Mul(masked, TensorT<S>::FromData({n, 2 * n}, std::move(pos_sel))));
  return MeanAll(Sub(RowLogSumExp(masked), pos));
}

template <typename S>
TensorT<S> MocoLoss(const TensorT<S> &queries, const TensorT<S> &keys,
                    const TensorT<S> &queue, S tau) {
  RequireProjections(queries, "moco: queries");
  RequireProjections(keys, "moco: keys");
  if (queries.shape() != keys.shape())
    throw ContractError("moco: query/key shapes differ");
  if (tau <= S(0)) throw ContractError("moco: tau must be positive");
  const int n = queries.rows();
  TensorT<S> pos = Scale(RowSum(Mul(queries, keys)), S(1) / tau);  // [N]
  TensorT<S> logits;
  if (queue.defined() && queue.rows() > 0) {
    if (queue.cols() != queries.cols())
      throw ContractError("moco: queue dim " + std::to_string(queue.cols()) +
                          " != projection dim " +
                          std::to_string(queries.cols()));
    TensorT<S> neg =
        Scale(Matmul(queries, Transpose(queue)), S(1) / tau);  // [N x K]
    logits = ConcatCols<S>({Reshape(pos, {n, 1}), neg});
  } else {
    LogWarn("moco: empty negative queue, positive-only warm-up step");
    logits = Reshape(pos, {n, 1});
  }
  return MeanAll(Sub(RowLogSumExp(logits), pos));
}

template <typename S>
TensorT<S> SupconLoss(const TensorT<S> &va, const TensorT<S> &vb,
                      const std::vector<int> &labels, S tau) {
  RequireProjections(va, "supcon: va");
  RequireProjections(vb, "supcon: vb");
  if (va.shape() != vb.shape())
    throw ContractError("supcon: view shapes differ");
  const int n = va.rows();
  if (static_cast<int>(labels.size()) != n)
    throw ContractError("supcon: got " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(n) + " rows");
  for (int l : labels)
    if (l < 0) throw ContractError("supcon: unlabeled sample in batch");
  if (tau <= S(0)) throw ContractError("supcon: tau must be positive");
  TensorT<S> z = ConcatRows<S>({va, vb});
  TensorT<S> sims = Scale(Matmul(va, Transpose(z)), S(1) / tau);  // [N x 2N]
  std::vector<S> mask(static_cast<size_t>(n) * 2 * n, S(0));
  std::vector<S> pos_w(static_cast<size_t>(n) * 2 * n, S(0));
  for (int i = 0; i < n; ++i) {
    mask[static_cast<size_t>(i) * 2 * n + i] = static_cast<S>(kMaskValue);
    int count = 0;
    for (int j = 0; j < 2 * n; ++j) {
      if (j == i) continue;  // anchor itself is never a positive
      if (labels[j % n] == labels[i]) ++count;
    }
    // count = 2 * (batch occurrences of labels[i]) - 1 >= 1: the other view
    // of the anchor is always a positive.
    const S w = S(1) / static_cast<S>(count);
    for (int j = 0; j < 2 * n; ++j) {
      if (j == i) continue;
      if (labels[j % n] == labels[i])
        pos_w[static_cast<size_t>(i) * 2 * n + j] = w;
    }
  }
  TensorT<S> masked =
      Add(sims, TensorT<S>::FromData({n, 2 * n}, std::move(mask)));
  TensorT<S> pos_mean =
      RowSum(Mul(sims, TensorT<S>::FromData({n, 2 * n}, std::move(pos_w))));
  return MeanAll(Sub(RowLogSumExp(masked), pos_mean));
}

template <typename S>
TensorT<S> SemiLoss(const TensorT<S> &queries, const TensorT<S> &keys,
                    const std::vector<int> &labels, const TensorT<S> &queue,
                    S tau, S lambda) {
  RequireProjections(queries, "semi: queries");
  if (static_cast<int>(labels.size()) != queries.rows())
    throw ContractError("semi: got " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(queries.rows()) +
                        " rows");
  std::vector<int> idx, sub_labels;
  for (int i = 0; i < queries.rows(); ++i) {
    if (labels[i] >= 0) {
      idx.push_back(i);
      sub_labels.push_back(labels[i]);
    }
  }
  TensorT<S> moco = MocoLoss(queries, keys, queue, tau);
  if (idx.empty()) {
    LogWarn("semi: batch has no labeled samples, using unsupervised term only");
    return Scale(moco, lambda);
  }
  TensorT<S> sup =
      SupconLoss(TakeRows(queries, idx), TakeRows(keys, idx), sub_labels, tau);
  return Add(sup, Scale(moco, lambda));
}

template TensorT<float> SimclrLoss(const TensorT<float> &,
                                   const TensorT<float> &, float);
template TensorT<double> SimclrLoss(const TensorT<double> &,
                                    const TensorT<double> &, double);
template TensorT<float> MocoLoss(const TensorT<float> &, const TensorT<float> &,
                                 const TensorT<float> &, float);
template TensorT<double> MocoLoss(const TensorT<double> &,
                                  const TensorT<double> &,
                                  const TensorT<double> &, double);
template TensorT<float> SupconLoss(const TensorT<float> &,
                                   const TensorT<float> &,
                                   const std::vector<int> &, float);
template TensorT<double> SupconLoss(const TensorT<double> &,
                                    const TensorT<double> &,
                                    const std::vector<int> &, double);
template TensorT<float> SemiLoss(const TensorT<float> &, const TensorT<float> &,
                                 const std::vector<int> &,
                                 const TensorT<float> &, float, float);
template TensorT<double> SemiLoss(const TensorT<double> &,
                                  const TensorT<double> &,
                                  const std::vector<int> &,
                                  const TensorT<double> &, double, double);

}  // namespace spkcon
