// core/include/spkcon/losses.h

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

#ifndef SPKCON_LOSSES_H_
#define SPKCON_LOSSES_H_

#include <deque>
#include <vector>

#include "spkcon/tensor.h"

namespace spkcon {

// FIFO ring of unit-norm key projections used as MoCo negatives. Rows are
// stored oldest-first; once size() == capacity(), each push evicts the oldest
// row. Pushed rows must be unit norm within 1e-5 (ContractError otherwise).
class NegativeQueue {
 public:
  explicit NegativeQueue(int capacity);

  void Push(const std::vector<float> &row);
  // Pushes each row of a [B x D] tensor in row order, detached.
  void PushRows(const Tensor &rows);

  int size() const { return static_cast<int>(rows_.size()); }
  int capacity() const { return capacity_; }
  // Row width; 0 until the first push.
  int dim() const { return dim_; }

  // Detached [size x dim] tensor of the current contents, oldest row first.
  // Undefined tensor when empty.
  Tensor Snapshot() const;

  // Checkpoint support: contents as one flat row-major array, oldest first.
  std::vector<float> Flatten() const;
  void Restore(int dim, const std::vector<float> &flat);

 private:
  int capacity_ = 0;
  int dim_ = 0;
  std::deque<std::vector<float>> rows_;
};

// All losses take L2-normalized projection rows and return a scalar tensor.
// Gradients flow only through tensors built with requires_grad; key-side
// inputs are expected to be detached (or produced by a no-grad encoder).

// SimCLR / NT-Xent over N anchor rows va and their positives vb (same order).
// Anchors are the view-a rows only; each anchor's denominator runs over the
// other 2N-1 rows of [va; vb] with the positive included. N == 1 gives 0.
template <typename S>
TensorT<S> SimclrLoss(const TensorT<S> &va, const TensorT<S> &vb, S tau);

// MoCo / InfoNCE: positive logit q_i . k_i plus negatives from the queue
// snapshot. An undefined or empty queue degenerates to the positive-only
// form (warm-up; logged).
template <typename S>
TensorT<S> MocoLoss(const TensorT<S> &queries, const TensorT<S> &keys,
                    const TensorT<S> &queue, S tau);

// Supervised contrastive loss over labeled pairs: anchors are the view-a
// rows; positives of anchor i are every other row of [va; vb] sharing
// labels[i]; the outer mean over positives sits outside the log. Labels must
// all be >= 0 (ContractError otherwise).
template <typename S>
TensorT<S> SupconLoss(const TensorT<S> &va, const TensorT<S> &vb,
                      const std::vector<int> &labels, S tau);

// Semi-supervised objective: SupCon over the labeled subset (label >= 0)
// plus lambda times MoCo over the full batch. A batch with no labeled rows
// degenerates to lambda * MoCo (logged).
template <typename S>
TensorT<S> SemiLoss(const TensorT<S> &queries, const TensorT<S> &keys,
                    const std::vector<int> &labels, const TensorT<S> &queue,
                    S tau, S lambda);

}  // namespace spkcon

#endif  // SPKCON_LOSSES_H_
