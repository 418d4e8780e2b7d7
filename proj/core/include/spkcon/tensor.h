// core/include/spkcon/tensor.h

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

#ifndef SPKCON_TENSOR_H_
#define SPKCON_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "spkcon/common.h"

namespace spkcon {

// Dense row-major tensor with reverse-mode differentiation, templated on the
// scalar type: float carries all training state, the double instantiation
// backs the 64-bit gradient-check oracles in the test suites.
//
// A forward op records its parents and a backward closure on the result node
// whenever some input requires gradients. Backward(loss) walks the recorded
// graph once in reverse topological order.
//
// Graph policy: a graph is single-shot. Backward() releases the recorded
// edges as it goes, so intermediates free as soon as the last handle drops.
// Gradients of leaf tensors accumulate (sum) across all uses within a graph
// and across Backward() calls until ZeroGrad() is called on the leaf.
template <typename S>
struct TensorNodeT {
  std::vector<int> shape;
  std::vector<S> values;
  std::vector<S> grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNodeT<S>>> parents;
  std::function<void(TensorNodeT<S> &)> backward_fn;

  int64_t numel() const {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return shape.empty() ? (values.empty() ? 0 : 1) : n;
  }

  void EnsureGrad() {
    if (grad.empty()) grad.assign(values.size(), S(0));
  }
};

template <typename S>
class TensorT {
 public:
  using Node = TensorNodeT<S>;

  TensorT() = default;
  explicit TensorT(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  static TensorT Zeros(const std::vector<int> &shape,
                       bool requires_grad = false);
  static TensorT Full(const std::vector<int> &shape, S value,
                      bool requires_grad = false);
  // Takes ownership of data; product of shape must equal data.size().
  static TensorT FromData(const std::vector<int> &shape, std::vector<S> data,
                          bool requires_grad = false);
  static TensorT Scalar(S value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int> &shape() const { return node_->shape; }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  int dim(int i) const { return node_->shape[i]; }
  int64_t numel() const { return node_->numel(); }

  // Rank-2 helpers.
  int rows() const { return node_->shape[0]; }
  int cols() const { return node_->shape[1]; }

  std::vector<S> &values() { return node_->values; }
  const std::vector<S> &values() const { return node_->values; }

  // Gradient accumulated by Backward(); empty until first accumulation.
  const std::vector<S> &grad() const { return node_->grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  void ZeroGrad() { node_->grad.clear(); }

  bool requires_grad() const { return node_->requires_grad; }
  void SetRequiresGrad(bool rg) { node_->requires_grad = rg; }

  // Value of a one-element tensor.
  S item() const;

  // Detached copy: same values, no graph, no gradient requirement.
  TensorT Detach() const;

  std::shared_ptr<Node> node() const { return node_; }
  Node *raw() const { return node_.get(); }

 private:
  std::shared_ptr<Node> node_;
};

// Runs reverse-mode differentiation from a scalar loss. Throws ContractError
// if loss is not a one-element tensor. Gradients land in the .grad() of every
// tensor with requires_grad on a path to the loss.
template <typename S>
void Backward(const TensorT<S> &loss);

using Tensor = TensorT<float>;

}  // namespace spkcon

#endif  // SPKCON_TENSOR_H_
