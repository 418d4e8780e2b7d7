// core/include/spkcon/ops.h

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

#ifndef SPKCON_OPS_H_
#define SPKCON_OPS_H_

#include <vector>

#include "spkcon/tensor.h"

namespace spkcon {

// Differentiable op set. Exactly what the encoder and loss stack need, no
// more. Sequence data is time-major [T, C]; batches of vectors are [B, D].
// All ops validate shapes and throw DimensionError with the offending shapes.

// Elementwise, same shape.
template <typename S>
TensorT<S> Add(const TensorT<S> &a, const TensorT<S> &b);
template <typename S>
TensorT<S> Mul(const TensorT<S> &a, const TensorT<S> &b);

// a - b, as Add(a, Scale(b, -1)) but fused.
template <typename S>
TensorT<S> Sub(const TensorT<S> &a, const TensorT<S> &b);

// x * s for a plain scalar s.
template <typename S>
TensorT<S> Scale(const TensorT<S> &x, S s);

// x[N,C] + v[C] broadcast over rows.
template <typename S>
TensorT<S> AddRow(const TensorT<S> &x, const TensorT<S> &v);

template <typename S>
TensorT<S> Matmul(const TensorT<S> &a, const TensorT<S> &b);

template <typename S>
TensorT<S> Transpose(const TensorT<S> &x);

// 1-D convolution over time. x is [T, c_in], weight [c_out, kernel * c_in]
// (taps outermost), bias [c_out]. Output [T - (kernel-1)*dilation, c_out].
template <typename S>
TensorT<S> Conv1d(const TensorT<S> &x, const TensorT<S> &weight,
                  const TensorT<S> &bias, int kernel, int dilation);

template <typename S>
TensorT<S> Relu(const TensorT<S> &x);

// Running statistics owned by the layer, updated in training mode with
// momentum 0.1 and used verbatim in eval mode. Kept outside the graph.
template <typename S>
struct BnStatsT {
  std::vector<S> running_mean;
  std::vector<S> running_var;

  explicit BnStatsT(int channels = 0)
      : running_mean(channels, S(0)), running_var(channels, S(1)) {}
};

// Batch normalization of x[N,C] per column. Training mode normalizes with
// batch statistics (biased variance) and folds them into the running stats;
// eval mode normalizes with the running stats.
template <typename S>
TensorT<S> BatchNorm(const TensorT<S> &x, const TensorT<S> &gamma,
                     const TensorT<S> &beta, BnStatsT<S> *stats, bool training,
                     S momentum = S(0.1), S eps = S(1e-5));

// Column-wise reductions over rows of x[N,C] -> [C]. Variance is biased.
template <typename S>
TensorT<S> ColMean(const TensorT<S> &x);
template <typename S>
TensorT<S> ColVar(const TensorT<S> &x);

// Statistics pooling: x[T,C] -> [2C] = per-channel mean followed by stddev,
// stddev = sqrt(var + 1e-10).
template <typename S>
TensorT<S> StatsPool(const TensorT<S> &x);

// Row-wise L2 normalization; rank-1 input is treated as a single row.
// Norm is sqrt(sum(x^2) + 1e-12) so zero rows map to zero, not NaN.
template <typename S>
TensorT<S> L2NormalizeRows(const TensorT<S> &x);

// Per-row reductions of x[N,C] -> [N].
template <typename S>
TensorT<S> RowSum(const TensorT<S> &x);
template <typename S>
TensorT<S> RowLogSumExp(const TensorT<S> &x);

template <typename S>
TensorT<S> SoftmaxRows(const TensorT<S> &x);

template <typename S>
TensorT<S> Exp(const TensorT<S> &x);
template <typename S>
TensorT<S> Log(const TensorT<S> &x);

template <typename S>
TensorT<S> Dot(const TensorT<S> &a, const TensorT<S> &b);

// Concatenation. Rows: stacks rank-1 inputs as rows or concatenates rank-2
// inputs along axis 0. Cols: concatenates along the last axis.
template <typename S>
TensorT<S> ConcatRows(const std::vector<TensorT<S>> &parts);
template <typename S>
TensorT<S> ConcatCols(const std::vector<TensorT<S>> &parts);

// Gather of whole rows (rank-2) or elements (rank-1).
template <typename S>
TensorT<S> TakeRows(const TensorT<S> &x, const std::vector<int> &indices);

// Same data, new shape (copies).
template <typename S>
TensorT<S> Reshape(const TensorT<S> &x, const std::vector<int> &shape);

template <typename S>
TensorT<S> SumAll(const TensorT<S> &x);
template <typename S>
TensorT<S> MeanAll(const TensorT<S> &x);

}  // namespace spkcon

#endif  // SPKCON_OPS_H_
