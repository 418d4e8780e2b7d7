// core/src/tensor.cc

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

#include "spkcon/tensor.h"

#include <fmt/format.h>

#include <algorithm>
#include <unordered_set>

namespace spkcon {

namespace {

template <typename S>
std::shared_ptr<TensorNodeT<S>> MakeNode(const std::vector<int> &shape,
                                         std::vector<S> data,
                                         bool requires_grad) {
  int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw DimensionError("negative dimension in tensor shape");
    n *= d;
  }
  if (static_cast<int64_t>(data.size()) != n) {
    throw DimensionError(
        fmt::format("tensor data length {} does not match shape product {}",
                    data.size(), n));
  }
  auto node = std::make_shared<TensorNodeT<S>>();
  node->shape = shape;
  node->values = std::move(data);
  node->requires_grad = requires_grad;
  return node;
}

}  // namespace

template <typename S>
TensorT<S> TensorT<S>::Zeros(const std::vector<int> &shape,
                             bool requires_grad) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return TensorT(MakeNode<S>(shape, std::vector<S>(n, S(0)), requires_grad));
}

template <typename S>
TensorT<S> TensorT<S>::Full(const std::vector<int> &shape, S value,
                            bool requires_grad) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return TensorT(MakeNode<S>(shape, std::vector<S>(n, value), requires_grad));
}

template <typename S>
TensorT<S> TensorT<S>::FromData(const std::vector<int> &shape,
                                std::vector<S> data, bool requires_grad) {
  return TensorT(MakeNode<S>(shape, std::move(data), requires_grad));
}

template <typename S>
TensorT<S> TensorT<S>::Scalar(S value, bool requires_grad) {
  return TensorT(MakeNode<S>({1}, std::vector<S>{value}, requires_grad));
}

template <typename S>
S TensorT<S>::item() const {
  if (!node_ || node_->values.size() != 1) {
    throw ContractError("item() requires a one-element tensor");
  }
  return node_->values[0];
}

template <typename S>
TensorT<S> TensorT<S>::Detach() const {
  return TensorT(MakeNode<S>(node_->shape, node_->values, false));
}

template <typename S>
void Backward(const TensorT<S> &loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError(fmt::format(
        "backward requires a scalar loss, got a tensor of {} elements",
        loss.defined() ? loss.numel() : 0));
  }
  auto *root = loss.raw();
  if (!root->requires_grad) return;

  // Iterative post-order DFS over parent edges. The order vector holds
  // owning pointers: releasing a node's edges below may drop the last other
  // reference to a node that still has pending backward work.
  std::vector<std::shared_ptr<TensorNodeT<S>>> order;
  std::unordered_set<TensorNodeT<S> *> seen;
  std::vector<std::pair<std::shared_ptr<TensorNodeT<S>>, size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      const std::shared_ptr<TensorNodeT<S>> &p = node->parents[next++];
      if (p->requires_grad && seen.insert(p.get()).second) {
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->EnsureGrad();
  root->grad[0] += S(1);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorNodeT<S> &node = **it;
    if (node.backward_fn) node.backward_fn(node);
    // Single-shot graph: release the recorded edges and closures.
    node.backward_fn = nullptr;
    node.parents.clear();
  }
}

template class TensorT<float>;
template class TensorT<double>;
template void Backward<float>(const TensorT<float> &);
template void Backward<double>(const TensorT<double> &);

}  // namespace spkcon
