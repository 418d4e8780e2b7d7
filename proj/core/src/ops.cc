// core/src/ops.cc

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

#include "spkcon/ops.h"

#include <fmt/format.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <string>
#include <utility>

namespace spkcon {

namespace {

template <typename S>
using NodePtr = std::shared_ptr<TensorNodeT<S>>;

std::string ShapeStr(const std::vector<int> &shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <typename S>
TensorT<S> MakeResult(std::vector<int> shape, std::vector<S> values,
                      std::vector<NodePtr<S>> parents,
                      std::function<void(TensorNodeT<S> &)> backward) {
  auto node = std::make_shared<TensorNodeT<S>>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  bool rg = false;
  for (const auto &p : parents) rg = rg || p->requires_grad;
  node->requires_grad = rg;
  if (rg) {
    node->parents = std::move(parents);
    node->backward_fn = std::move(backward);
  }
  return TensorT<S>(node);
}

template <typename S>
void AccumulateInto(const NodePtr<S> &p, const std::vector<S> &delta) {
  if (!p->requires_grad) return;
  p->EnsureGrad();
  S *g = p->grad.data();
  const S *d = delta.data();
  for (size_t i = 0; i < delta.size(); ++i) g[i] += d[i];
}

template <typename S>
void RequireSameShape(const TensorT<S> &a, const TensorT<S> &b,
                      const char *op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(fmt::format("{}: shape mismatch {} vs {}", op,
                                     ShapeStr(a.shape()), ShapeStr(b.shape())));
  }
}

template <typename S>
void RequireRank(const TensorT<S> &x, int rank, const char *op) {
  if (x.rank() != rank) {
    throw DimensionError(fmt::format("{}: expected rank-{} tensor, got {}", op,
                                     rank, ShapeStr(x.shape())));
  }
}

}  // namespace

template <typename S>
TensorT<S> Add(const TensorT<S> &a, const TensorT<S> &b) {
  RequireSameShape(a, b, "add");
  std::vector<S> out(a.values());
  const S *bv = b.values().data();
  for (size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  auto pa = a.node(), pb = b.node();
  return MakeResult<S>(
      a.shape(), std::move(out), {pa, pb}, [pa, pb](TensorNodeT<S> &self) {
        AccumulateInto(pa, self.grad);
        AccumulateInto(pb, self.grad);
      });
}

template <typename S>
TensorT<S> Sub(const TensorT<S> &a, const TensorT<S> &b) {
  RequireSameShape(a, b, "sub");
  std::vector<S> out(a.values());
  const S *bv = b.values().data();
  for (size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  auto pa = a.node(), pb = b.node();
  return MakeResult<S>(a.shape(), std::move(out), {pa, pb},
                       [pa, pb](TensorNodeT<S> &self) {
                         AccumulateInto(pa, self.grad);
                         if (pb->requires_grad) {
                           pb->EnsureGrad();
                           for (size_t i = 0; i < self.grad.size(); ++i)
                             pb->grad[i] -= self.grad[i];
                         }
                       });
}

template <typename S>
TensorT<S> Mul(const TensorT<S> &a, const TensorT<S> &b) {
  RequireSameShape(a, b, "mul");
  std::vector<S> out(a.values());
  const S *bv = b.values().data();
  for (size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  auto pa = a.node(), pb = b.node();
  return MakeResult<S>(a.shape(), std::move(out), {pa, pb},
                       [pa, pb](TensorNodeT<S> &self) {
                         if (pa->requires_grad) {
                           pa->EnsureGrad();
                           for (size_t i = 0; i < self.grad.size(); ++i)
                             pa->grad[i] += self.grad[i] * pb->values[i];
                         }
                         if (pb->requires_grad) {
                           pb->EnsureGrad();
                           for (size_t i = 0; i < self.grad.size(); ++i)
                             pb->grad[i] += self.grad[i] * pa->values[i];
                         }
                       });
}

template <typename S>
TensorT<S> Scale(const TensorT<S> &x, S s) {
  std::vector<S> out(x.values());
  for (S &v : out) v *= s;
  auto px = x.node();
  return MakeResult<S>(x.shape(), std::move(out), {px},
                       [px, s](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (size_t i = 0; i < self.grad.size(); ++i)
                           px->grad[i] += s * self.grad[i];
                       });
}

template <typename S>
TensorT<S> AddRow(const TensorT<S> &x, const TensorT<S> &v) {
  RequireRank(x, 2, "add_row");
  RequireRank(v, 1, "add_row");
  if (x.cols() != v.dim(0)) {
    throw DimensionError(fmt::format("add_row: shape mismatch {} vs {}",
                                     ShapeStr(x.shape()),
                                     ShapeStr(v.shape())));
  }
  int n = x.rows(), c = x.cols();
  std::vector<S> out(x.values());
  const S *vv = v.values().data();
  for (int r = 0; r < n; ++r) {
    S *row = out.data() + static_cast<size_t>(r) * c;
    for (int j = 0; j < c; ++j) row[j] += vv[j];
  }
  auto px = x.node(), pv = v.node();
  return MakeResult<S>(
      x.shape(), std::move(out), {px, pv}, [px, pv, n, c](TensorNodeT<S> &self) {
        AccumulateInto(px, self.grad);
        if (pv->requires_grad) {
          pv->EnsureGrad();
          for (int r = 0; r < n; ++r) {
            const S *g = self.grad.data() + static_cast<size_t>(r) * c;
            for (int j = 0; j < c; ++j) pv->grad[j] += g[j];
          }
        }
      });
}

template <typename S>
TensorT<S> Matmul(const TensorT<S> &a, const TensorT<S> &b) {
  RequireRank(a, 2, "matmul");
  RequireRank(b, 2, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError(fmt::format("matmul: inner dims differ, {} x {}",
                                     ShapeStr(a.shape()),
                                     ShapeStr(b.shape())));
  }
  const int n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<S> out(static_cast<size_t>(n) * m, S(0));
  {
    const S *av = a.values().data();
    const S *bv = b.values().data();
    S *ov = out.data();
    for (int i = 0; i < n; ++i) {
      for (int p = 0; p < k; ++p) {
        S aip = av[static_cast<size_t>(i) * k + p];
        const S *brow = bv + static_cast<size_t>(p) * m;
        S *orow = ov + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) orow[j] += aip * brow[j];
      }
    }
  }
  auto pa = a.node(), pb = b.node();
  return MakeResult<S>(
      {n, m}, std::move(out), {pa, pb},
      [pa, pb, n, k, m](TensorNodeT<S> &self) {
        const S *g = self.grad.data();
        if (pa->requires_grad) {
          pa->EnsureGrad();
          const S *bv = pb->values.data();
          for (int i = 0; i < n; ++i) {
            for (int p = 0; p < k; ++p) {
              const S *grow = g + static_cast<size_t>(i) * m;
              const S *brow = bv + static_cast<size_t>(p) * m;
              S acc = 0;
              for (int j = 0; j < m; ++j) acc += grow[j] * brow[j];
              pa->grad[static_cast<size_t>(i) * k + p] += acc;
            }
          }
        }
        if (pb->requires_grad) {
          pb->EnsureGrad();
          const S *av = pa->values.data();
          for (int i = 0; i < n; ++i) {
            const S *grow = g + static_cast<size_t>(i) * m;
            for (int p = 0; p < k; ++p) {
              S aip = av[static_cast<size_t>(i) * k + p];
              S *brow = pb->grad.data() + static_cast<size_t>(p) * m;
              for (int j = 0; j < m; ++j) brow[j] += aip * grow[j];
            }
          }
        }
      });
}

template <typename S>
TensorT<S> Transpose(const TensorT<S> &x) {
  RequireRank(x, 2, "transpose");
  const int n = x.rows(), c = x.cols();
  std::vector<S> out(static_cast<size_t>(n) * c);
  const S *xv = x.values().data();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c; ++j)
      out[static_cast<size_t>(j) * n + i] = xv[static_cast<size_t>(i) * c + j];
  auto px = x.node();
  return MakeResult<S>({c, n}, std::move(out), {px},
                       [px, n, c](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (int j = 0; j < c; ++j)
                           for (int i = 0; i < n; ++i)
                             px->grad[static_cast<size_t>(i) * c + j] +=
                                 self.grad[static_cast<size_t>(j) * n + i];
                       });
}

template <typename S>
TensorT<S> Conv1d(const TensorT<S> &x, const TensorT<S> &weight,
                  const TensorT<S> &bias, int kernel, int dilation) {
  RequireRank(x, 2, "conv1d");
  RequireRank(weight, 2, "conv1d");
  RequireRank(bias, 1, "conv1d");
  if (kernel < 1 || dilation < 1) {
    throw ContractError("conv1d: kernel and dilation must be >= 1");
  }
  const int t_in = x.rows(), c_in = x.cols();
  const int c_out = weight.rows();
  if (weight.cols() != kernel * c_in || bias.dim(0) != c_out) {
    throw DimensionError(fmt::format(
        "conv1d: weight {} / bias {} inconsistent with input {} kernel {}",
        ShapeStr(weight.shape()), ShapeStr(bias.shape()), ShapeStr(x.shape()),
        kernel));
  }
  const int t_out = t_in - (kernel - 1) * dilation;
  if (t_out < 1) {
    throw DimensionError(
        fmt::format("conv1d: input of {} frames too short for kernel {} "
                    "dilation {} (needs >= {})",
                    t_in, kernel, dilation, (kernel - 1) * dilation + 1));
  }
  std::vector<S> out(static_cast<size_t>(t_out) * c_out);
  {
    const S *xv = x.values().data();
    const S *wv = weight.values().data();
    const S *bv = bias.values().data();
    const int kc = kernel * c_in;
    for (int t = 0; t < t_out; ++t) {
      S *orow = out.data() + static_cast<size_t>(t) * c_out;
      for (int o = 0; o < c_out; ++o) {
        const S *wrow = wv + static_cast<size_t>(o) * kc;
        S acc = bv[o];
        for (int k = 0; k < kernel; ++k) {
          const S *xrow = xv + static_cast<size_t>(t + k * dilation) * c_in;
          const S *wk = wrow + static_cast<size_t>(k) * c_in;
          for (int i = 0; i < c_in; ++i) acc += wk[i] * xrow[i];
        }
        orow[o] = acc;
      }
    }
  }
  auto px = x.node(), pw = weight.node(), pb = bias.node();
  return MakeResult<S>(
      {t_out, c_out}, std::move(out), {px, pw, pb},
      [px, pw, pb, t_out, c_in, c_out, kernel, dilation](TensorNodeT<S> &self) {
        const S *g = self.grad.data();
        const int kc = kernel * c_in;
        if (pb->requires_grad) {
          pb->EnsureGrad();
          for (int t = 0; t < t_out; ++t) {
            const S *grow = g + static_cast<size_t>(t) * c_out;
            for (int o = 0; o < c_out; ++o) pb->grad[o] += grow[o];
          }
        }
        if (pw->requires_grad) {
          pw->EnsureGrad();
          const S *xv = px->values.data();
          for (int o = 0; o < c_out; ++o) {
            S *wrow = pw->grad.data() + static_cast<size_t>(o) * kc;
            for (int t = 0; t < t_out; ++t) {
              S go = g[static_cast<size_t>(t) * c_out + o];
              for (int k = 0; k < kernel; ++k) {
                const S *xrow =
                    xv + static_cast<size_t>(t + k * dilation) * c_in;
                S *wk = wrow + static_cast<size_t>(k) * c_in;
                for (int i = 0; i < c_in; ++i) wk[i] += go * xrow[i];
              }
            }
          }
        }
        if (px->requires_grad) {
          px->EnsureGrad();
          const S *wv = pw->values.data();
          for (int t = 0; t < t_out; ++t) {
            const S *grow = g + static_cast<size_t>(t) * c_out;
            for (int o = 0; o < c_out; ++o) {
              S go = grow[o];
              const S *wrow = wv + static_cast<size_t>(o) * kc;
              for (int k = 0; k < kernel; ++k) {
                S *xrow = px->grad.data() +
                          static_cast<size_t>(t + k * dilation) * c_in;
                const S *wk = wrow + static_cast<size_t>(k) * c_in;
                for (int i = 0; i < c_in; ++i) xrow[i] += go * wk[i];
              }
            }
          }
        }
      });
}

template <typename S>
TensorT<S> Relu(const TensorT<S> &x) {
  std::vector<S> out(x.values());
  for (S &v : out) v = v > S(0) ? v : S(0);
  auto px = x.node();
  return MakeResult<S>(x.shape(), std::move(out), {px},
                       [px](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (size_t i = 0; i < self.grad.size(); ++i)
                           if (px->values[i] > S(0))
                             px->grad[i] += self.grad[i];
                       });
}

template <typename S>
TensorT<S> BatchNorm(const TensorT<S> &x, const TensorT<S> &gamma,
                     const TensorT<S> &beta, BnStatsT<S> *stats, bool training,
                     S momentum, S eps) {
  RequireRank(x, 2, "batch_norm");
  const int n = x.rows(), c = x.cols();
  if (gamma.dim(0) != c || beta.dim(0) != c ||
      static_cast<int>(stats->running_mean.size()) != c) {
    throw DimensionError(fmt::format(
        "batch_norm: channel mismatch, x {} gamma {} beta {} stats {}",
        ShapeStr(x.shape()), ShapeStr(gamma.shape()), ShapeStr(beta.shape()),
        stats->running_mean.size()));
  }
  std::vector<S> mean(c), inv_std(c);
  const S *xv = x.values().data();
  if (training) {
    for (int j = 0; j < c; ++j) {
      double acc = 0;
      for (int r = 0; r < n; ++r) acc += xv[static_cast<size_t>(r) * c + j];
      mean[j] = static_cast<S>(acc / n);
    }
    for (int j = 0; j < c; ++j) {
      double acc = 0;
      for (int r = 0; r < n; ++r) {
        double d = xv[static_cast<size_t>(r) * c + j] - mean[j];
        acc += d * d;
      }
      S var = static_cast<S>(acc / n);
      inv_std[j] = S(1) / std::sqrt(var + eps);
      stats->running_mean[j] =
          (S(1) - momentum) * stats->running_mean[j] + momentum * mean[j];
      stats->running_var[j] =
          (S(1) - momentum) * stats->running_var[j] + momentum * var;
    }
  } else {
    for (int j = 0; j < c; ++j) {
      mean[j] = stats->running_mean[j];
      inv_std[j] = S(1) / std::sqrt(stats->running_var[j] + eps);
    }
  }

  std::vector<S> xhat(static_cast<size_t>(n) * c);
  std::vector<S> out(static_cast<size_t>(n) * c);
  const S *gv = gamma.values().data();
  const S *bv = beta.values().data();
  for (int r = 0; r < n; ++r) {
    const S *xrow = xv + static_cast<size_t>(r) * c;
    S *hrow = xhat.data() + static_cast<size_t>(r) * c;
    S *orow = out.data() + static_cast<size_t>(r) * c;
    for (int j = 0; j < c; ++j) {
      hrow[j] = (xrow[j] - mean[j]) * inv_std[j];
      orow[j] = gv[j] * hrow[j] + bv[j];
    }
  }

  auto px = x.node(), pg = gamma.node(), pb = beta.node();
  auto xhat_sp = std::make_shared<std::vector<S>>(std::move(xhat));
  auto inv_sp = std::make_shared<std::vector<S>>(std::move(inv_std));
  return MakeResult<S>(
      x.shape(), std::move(out), {px, pg, pb},
      [px, pg, pb, xhat_sp, inv_sp, n, c, training](TensorNodeT<S> &self) {
        const S *g = self.grad.data();
        const std::vector<S> &xh = *xhat_sp;
        const std::vector<S> &inv = *inv_sp;
        if (pg->requires_grad) {
          pg->EnsureGrad();
          for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j)
              pg->grad[j] += g[static_cast<size_t>(r) * c + j] *
                             xh[static_cast<size_t>(r) * c + j];
        }
        if (pb->requires_grad) {
          pb->EnsureGrad();
          for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j)
              pb->grad[j] += g[static_cast<size_t>(r) * c + j];
        }
        if (!px->requires_grad) return;
        px->EnsureGrad();
        const S *gam = pg->values.data();
        if (!training) {
          for (int r = 0; r < n; ++r)
            for (int j = 0; j < c; ++j)
              px->grad[static_cast<size_t>(r) * c + j] +=
                  g[static_cast<size_t>(r) * c + j] * gam[j] * inv[j];
          return;
        }
        for (int j = 0; j < c; ++j) {
          double sum_dxh = 0, sum_dxh_xh = 0;
          for (int r = 0; r < n; ++r) {
            double dxh = static_cast<double>(g[static_cast<size_t>(r) * c + j]) *
                         gam[j];
            sum_dxh += dxh;
            sum_dxh_xh += dxh * xh[static_cast<size_t>(r) * c + j];
          }
          for (int r = 0; r < n; ++r) {
            double dxh = static_cast<double>(g[static_cast<size_t>(r) * c + j]) *
                         gam[j];
            double dx = (dxh - sum_dxh / n -
                         xh[static_cast<size_t>(r) * c + j] * sum_dxh_xh / n) *
                        inv[j];
            px->grad[static_cast<size_t>(r) * c + j] += static_cast<S>(dx);
          }
        }
      });
}

template <typename S>
TensorT<S> ColMean(const TensorT<S> &x) {
  RequireRank(x, 2, "col_mean");
  const int n = x.rows(), c = x.cols();
  std::vector<S> out(c);
  const S *xv = x.values().data();
  for (int j = 0; j < c; ++j) {
    double acc = 0;
    for (int r = 0; r < n; ++r) acc += xv[static_cast<size_t>(r) * c + j];
    out[j] = static_cast<S>(acc / n);
  }
  auto px = x.node();
  return MakeResult<S>({c}, std::move(out), {px},
                       [px, n, c](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (int r = 0; r < n; ++r)
                           for (int j = 0; j < c; ++j)
                             px->grad[static_cast<size_t>(r) * c + j] +=
                                 self.grad[j] / S(n);
                       });
}

template <typename S>
TensorT<S> ColVar(const TensorT<S> &x) {
  RequireRank(x, 2, "col_var");
  const int n = x.rows(), c = x.cols();
  std::vector<S> mean(c), out(c);
  const S *xv = x.values().data();
  for (int j = 0; j < c; ++j) {
    double acc = 0;
    for (int r = 0; r < n; ++r) acc += xv[static_cast<size_t>(r) * c + j];
    mean[j] = static_cast<S>(acc / n);
  }
  for (int j = 0; j < c; ++j) {
    double acc = 0;
    for (int r = 0; r < n; ++r) {
      double d = xv[static_cast<size_t>(r) * c + j] - mean[j];
      acc += d * d;
    }
    out[j] = static_cast<S>(acc / n);
  }
  auto px = x.node();
  auto mean_sp = std::make_shared<std::vector<S>>(std::move(mean));
  return MakeResult<S>(
      {c}, std::move(out), {px}, [px, mean_sp, n, c](TensorNodeT<S> &self) {
        if (!px->requires_grad) return;
        px->EnsureGrad();
        const std::vector<S> &mu = *mean_sp;
        for (int r = 0; r < n; ++r)
          for (int j = 0; j < c; ++j)
            px->grad[static_cast<size_t>(r) * c + j] +=
                self.grad[j] * S(2) *
                (px->values[static_cast<size_t>(r) * c + j] - mu[j]) / S(n);
      });
}

template <typename S>
TensorT<S> StatsPool(const TensorT<S> &x) {
  RequireRank(x, 2, "stats_pool");
  const int t = x.rows(), c = x.cols();
  const S kEps = S(1e-10);
  std::vector<S> mean(c), sd(c);
  const S *xv = x.values().data();
  for (int j = 0; j < c; ++j) {
    double acc = 0;
    for (int r = 0; r < t; ++r) acc += xv[static_cast<size_t>(r) * c + j];
    mean[j] = static_cast<S>(acc / t);
  }
  for (int j = 0; j < c; ++j) {
    double acc = 0;
    for (int r = 0; r < t; ++r) {
      double d = xv[static_cast<size_t>(r) * c + j] - mean[j];
      acc += d * d;
    }
    sd[j] = std::sqrt(static_cast<S>(acc / t) + kEps);
  }
  std::vector<S> out(2 * c);
  std::copy(mean.begin(), mean.end(), out.begin());
  std::copy(sd.begin(), sd.end(), out.begin() + c);
  auto px = x.node();
  auto mean_sp = std::make_shared<std::vector<S>>(std::move(mean));
  auto sd_sp = std::make_shared<std::vector<S>>(std::move(sd));
  return MakeResult<S>(
      {2 * c}, std::move(out), {px},
      [px, mean_sp, sd_sp, t, c](TensorNodeT<S> &self) {
        if (!px->requires_grad) return;
        px->EnsureGrad();
        const std::vector<S> &mu = *mean_sp;
        const std::vector<S> &sd = *sd_sp;
        for (int r = 0; r < t; ++r) {
          const S *xrow = px->values.data() + static_cast<size_t>(r) * c;
          S *grow = px->grad.data() + static_cast<size_t>(r) * c;
          for (int j = 0; j < c; ++j) {
            grow[j] += self.grad[j] / S(t);
            grow[j] += self.grad[c + j] * (xrow[j] - mu[j]) / (S(t) * sd[j]);
          }
        }
      });
}

template <typename S>
TensorT<S> L2NormalizeRows(const TensorT<S> &x) {
  const S kEps = S(1e-12);
  int n, c;
  if (x.rank() == 1) {
    n = 1;
    c = x.dim(0);
  } else if (x.rank() == 2) {
    n = x.rows();
    c = x.cols();
  } else {
    throw DimensionError(fmt::format("l2_normalize: expected rank 1 or 2, got {}",
                                     ShapeStr(x.shape())));
  }
  std::vector<S> out(x.values().size());
  std::vector<S> norms(n);
  const S *xv = x.values().data();
  for (int r = 0; r < n; ++r) {
    double acc = 0;
    const S *xrow = xv + static_cast<size_t>(r) * c;
    for (int j = 0; j < c; ++j) acc += static_cast<double>(xrow[j]) * xrow[j];
    norms[r] = static_cast<S>(std::sqrt(acc + kEps));
    S *orow = out.data() + static_cast<size_t>(r) * c;
    for (int j = 0; j < c; ++j) orow[j] = xrow[j] / norms[r];
  }
  auto px = x.node();
  auto norms_sp = std::make_shared<std::vector<S>>(std::move(norms));
  return MakeResult<S>(
      x.shape(), std::move(out), {px},
      [px, norms_sp, n, c](TensorNodeT<S> &self) {
        if (!px->requires_grad) return;
        px->EnsureGrad();
        for (int r = 0; r < n; ++r) {
          const S *y = self.values.data() + static_cast<size_t>(r) * c;
          const S *g = self.grad.data() + static_cast<size_t>(r) * c;
          S *dx = px->grad.data() + static_cast<size_t>(r) * c;
          double gy = 0;
          for (int j = 0; j < c; ++j) gy += static_cast<double>(g[j]) * y[j];
          S inv = S(1) / (*norms_sp)[r];
          for (int j = 0; j < c; ++j)
            dx[j] += (g[j] - static_cast<S>(gy) * y[j]) * inv;
        }
      });
}

template <typename S>
TensorT<S> RowSum(const TensorT<S> &x) {
  RequireRank(x, 2, "row_sum");
  const int n = x.rows(), c = x.cols();
  std::vector<S> out(n);
  const S *xv = x.values().data();
  for (int r = 0; r < n; ++r) {
    double acc = 0;
    for (int j = 0; j < c; ++j) acc += xv[static_cast<size_t>(r) * c + j];
    out[r] = static_cast<S>(acc);
  }
  auto px = x.node();
  return MakeResult<S>({n}, std::move(out), {px},
                       [px, n, c](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (int r = 0; r < n; ++r)
                           for (int j = 0; j < c; ++j)
                             px->grad[static_cast<size_t>(r) * c + j] +=
                                 self.grad[r];
                       });
}

template <typename S>
TensorT<S> RowLogSumExp(const TensorT<S> &x) {
  RequireRank(x, 2, "row_logsumexp");
  const int n = x.rows(), c = x.cols();
  std::vector<S> out(n);
  const S *xv = x.values().data();
  for (int r = 0; r < n; ++r) {
    const S *xrow = xv + static_cast<size_t>(r) * c;
    S m = xrow[0];
    for (int j = 1; j < c; ++j) m = std::max(m, xrow[j]);
    double acc = 0;
    for (int j = 0; j < c; ++j) acc += std::exp(static_cast<double>(xrow[j] - m));
    out[r] = m + static_cast<S>(std::log(acc));
  }
  auto px = x.node();
  return MakeResult<S>(
      {n}, std::move(out), {px}, [px, n, c](TensorNodeT<S> &self) {
        if (!px->requires_grad) return;
        px->EnsureGrad();
        for (int r = 0; r < n; ++r) {
          const S *xrow = px->values.data() + static_cast<size_t>(r) * c;
          S *dx = px->grad.data() + static_cast<size_t>(r) * c;
          S lse = self.values[r];
          S g = self.grad[r];
          for (int j = 0; j < c; ++j) dx[j] += g * std::exp(xrow[j] - lse);
        }
      });
}

template <typename S>
TensorT<S> SoftmaxRows(const TensorT<S> &x) {
  RequireRank(x, 2, "softmax_rows");
  const int n = x.rows(), c = x.cols();
  std::vector<S> out(static_cast<size_t>(n) * c);
  const S *xv = x.values().data();
  for (int r = 0; r < n; ++r) {
    const S *xrow = xv + static_cast<size_t>(r) * c;
    S *orow = out.data() + static_cast<size_t>(r) * c;
    S m = xrow[0];
    for (int j = 1; j < c; ++j) m = std::max(m, xrow[j]);
    double acc = 0;
    for (int j = 0; j < c; ++j) {
      orow[j] = std::exp(xrow[j] - m);
      acc += orow[j];
    }
    for (int j = 0; j < c; ++j) orow[j] = static_cast<S>(orow[j] / acc);
  }
  auto px = x.node();
  return MakeResult<S>(
      x.shape(), std::move(out), {px}, [px, n, c](TensorNodeT<S> &self) {
        if (!px->requires_grad) return;
        px->EnsureGrad();
        for (int r = 0; r < n; ++r) {
          const S *y = self.values.data() + static_cast<size_t>(r) * c;
          const S *g = self.grad.data() + static_cast<size_t>(r) * c;
          S *dx = px->grad.data() + static_cast<size_t>(r) * c;
          double gy = 0;
          for (int j = 0; j < c; ++j) gy += static_cast<double>(g[j]) * y[j];
          for (int j = 0; j < c; ++j)
            dx[j] += y[j] * (g[j] - static_cast<S>(gy));
        }
      });
}

template <typename S>
TensorT<S> Exp(const TensorT<S> &x) {
  std::vector<S> out(x.values().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::exp(x.values()[i]);
  auto px = x.node();
  return MakeResult<S>(x.shape(), std::move(out), {px},
                       [px](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (size_t i = 0; i < self.grad.size(); ++i)
                           px->grad[i] += self.grad[i] * self.values[i];
                       });
}

template <typename S>
TensorT<S> Log(const TensorT<S> &x) {
  std::vector<S> out(x.values().size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::log(x.values()[i]);
  auto px = x.node();
  return MakeResult<S>(x.shape(), std::move(out), {px},
                       [px](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (size_t i = 0; i < self.grad.size(); ++i)
                           px->grad[i] += self.grad[i] / px->values[i];
                       });
}

template <typename S>
TensorT<S> Dot(const TensorT<S> &a, const TensorT<S> &b) {
  RequireRank(a, 1, "dot");
  RequireRank(b, 1, "dot");
  RequireSameShape(a, b, "dot");
  double acc = 0;
  for (size_t i = 0; i < a.values().size(); ++i)
    acc += static_cast<double>(a.values()[i]) * b.values()[i];
  auto pa = a.node(), pb = b.node();
  return MakeResult<S>({1}, {static_cast<S>(acc)}, {pa, pb},
                       [pa, pb](TensorNodeT<S> &self) {
                         S g = self.grad[0];
                         if (pa->requires_grad) {
                           pa->EnsureGrad();
                           for (size_t i = 0; i < pa->grad.size(); ++i)
                             pa->grad[i] += g * pb->values[i];
                         }
                         if (pb->requires_grad) {
                           pb->EnsureGrad();
                           for (size_t i = 0; i < pb->grad.size(); ++i)
                             pb->grad[i] += g * pa->values[i];
                         }
                       });
}

template <typename S>
TensorT<S> ConcatRows(const std::vector<TensorT<S>> &parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  int c = parts[0].rank() == 1 ? parts[0].dim(0) : parts[0].cols();
  int total_rows = 0;
  for (const auto &p : parts) {
    if (p.rank() == 1) {
      if (p.dim(0) != c)
        throw DimensionError(fmt::format("concat_rows: width mismatch {} vs {}",
                                         c, p.dim(0)));
      total_rows += 1;
    } else if (p.rank() == 2) {
      if (p.cols() != c)
        throw DimensionError(fmt::format("concat_rows: width mismatch {} vs {}",
                                         c, p.cols()));
      total_rows += p.rows();
    } else {
      throw DimensionError("concat_rows: inputs must be rank 1 or 2");
    }
  }
  std::vector<S> out;
  out.reserve(static_cast<size_t>(total_rows) * c);
  std::vector<NodePtr<S>> parents;
  parents.reserve(parts.size());
  for (const auto &p : parts) {
    out.insert(out.end(), p.values().begin(), p.values().end());
    parents.push_back(p.node());
  }
  auto parents_copy = parents;
  return MakeResult<S>(
      {total_rows, c}, std::move(out), std::move(parents),
      [parents_copy](TensorNodeT<S> &self) {
        size_t off = 0;
        for (const auto &p : parents_copy) {
          size_t len = p->values.size();
          if (p->requires_grad) {
            p->EnsureGrad();
            for (size_t i = 0; i < len; ++i) p->grad[i] += self.grad[off + i];
          }
          off += len;
        }
      });
}

template <typename S>
TensorT<S> ConcatCols(const std::vector<TensorT<S>> &parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const int rank = parts[0].rank();
  for (const auto &p : parts) {
    if (p.rank() != rank)
      throw DimensionError("concat_cols: mixed ranks");
  }
  if (rank == 1) {
    int total = 0;
    for (const auto &p : parts) total += p.dim(0);
    std::vector<S> out;
    out.reserve(total);
    std::vector<NodePtr<S>> parents;
    for (const auto &p : parts) {
      out.insert(out.end(), p.values().begin(), p.values().end());
      parents.push_back(p.node());
    }
    auto parents_copy = parents;
    return MakeResult<S>(
        {total}, std::move(out), std::move(parents),
        [parents_copy](TensorNodeT<S> &self) {
          size_t off = 0;
          for (const auto &p : parents_copy) {
            size_t len = p->values.size();
            if (p->requires_grad) {
              p->EnsureGrad();
              for (size_t i = 0; i < len; ++i)
                p->grad[i] += self.grad[off + i];
            }
            off += len;
          }
        });
  }
  const int n = parts[0].rows();
  int total_c = 0;
  for (const auto &p : parts) {
    RequireRank(p, 2, "concat_cols");
    if (p.rows() != n)
      throw DimensionError(fmt::format("concat_cols: row mismatch {} vs {}", n,
                                       p.rows()));
    total_c += p.cols();
  }
  std::vector<S> out(static_cast<size_t>(n) * total_c);
  std::vector<NodePtr<S>> parents;
  std::vector<int> widths;
  for (const auto &p : parts) {
    parents.push_back(p.node());
    widths.push_back(p.cols());
  }
  {
    int off = 0;
    for (size_t pi = 0; pi < parts.size(); ++pi) {
      const S *pv = parts[pi].values().data();
      int w = widths[pi];
      for (int r = 0; r < n; ++r)
        std::memcpy(out.data() + static_cast<size_t>(r) * total_c + off,
                    pv + static_cast<size_t>(r) * w, sizeof(S) * w);
      off += w;
    }
  }
  auto parents_copy = parents;
  return MakeResult<S>(
      {n, total_c}, std::move(out), std::move(parents),
      [parents_copy, widths, n, total_c](TensorNodeT<S> &self) {
        int off = 0;
        for (size_t pi = 0; pi < parents_copy.size(); ++pi) {
          const auto &p = parents_copy[pi];
          int w = widths[pi];
          if (p->requires_grad) {
            p->EnsureGrad();
            for (int r = 0; r < n; ++r)
              for (int j = 0; j < w; ++j)
                p->grad[static_cast<size_t>(r) * w + j] +=
                    self.grad[static_cast<size_t>(r) * total_c + off + j];
          }
          off += w;
        }
      });
}

template <typename S>
TensorT<S> TakeRows(const TensorT<S> &x, const std::vector<int> &indices) {
  if (x.rank() != 1 && x.rank() != 2)
    throw DimensionError("take_rows: input must be rank 1 or 2");
  const int n = x.dim(0);
  const int c = x.rank() == 2 ? x.cols() : 1;
  for (int idx : indices) {
    if (idx < 0 || idx >= n)
      throw ContractError(fmt::format("take_rows: index {} out of range [0, {})",
                                      idx, n));
  }
  const int m = static_cast<int>(indices.size());
  std::vector<S> out(static_cast<size_t>(m) * c);
  const S *xv = x.values().data();
  for (int i = 0; i < m; ++i)
    std::memcpy(out.data() + static_cast<size_t>(i) * c,
                xv + static_cast<size_t>(indices[i]) * c, sizeof(S) * c);
  std::vector<int> shape =
      x.rank() == 2 ? std::vector<int>{m, c} : std::vector<int>{m};
  auto px = x.node();
  return MakeResult<S>(
      std::move(shape), std::move(out), {px},
      [px, indices, c](TensorNodeT<S> &self) {
        if (!px->requires_grad) return;
        px->EnsureGrad();
        for (size_t i = 0; i < indices.size(); ++i)
          for (int j = 0; j < c; ++j)
            px->grad[static_cast<size_t>(indices[i]) * c + j] +=
                self.grad[i * c + j];
      });
}

template <typename S>
TensorT<S> Reshape(const TensorT<S> &x, const std::vector<int> &shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  if (n != x.numel())
    throw DimensionError(fmt::format("reshape: cannot view {} as {}",
                                     ShapeStr(x.shape()), ShapeStr(shape)));
  auto px = x.node();
  return MakeResult<S>(shape, x.values(), {px}, [px](TensorNodeT<S> &self) {
    AccumulateInto(px, self.grad);
  });
}

template <typename S>
TensorT<S> SumAll(const TensorT<S> &x) {
  double acc = 0;
  for (S v : x.values()) acc += v;
  auto px = x.node();
  return MakeResult<S>({1}, {static_cast<S>(acc)}, {px},
                       [px](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (S &g : px->grad) g += self.grad[0];
                       });
}

template <typename S>
TensorT<S> MeanAll(const TensorT<S> &x) {
  if (x.numel() == 0) throw ContractError("mean_all: empty tensor");
  double acc = 0;
  for (S v : x.values()) acc += v;
  const S inv = S(1) / static_cast<S>(x.numel());
  auto px = x.node();
  return MakeResult<S>({1}, {static_cast<S>(acc) * inv}, {px},
                       [px, inv](TensorNodeT<S> &self) {
                         if (!px->requires_grad) return;
                         px->EnsureGrad();
                         for (S &g : px->grad) g += self.grad[0] * inv;
                       });
}

#define SPKCON_INSTANTIATE_OPS(S)                                             \
  template TensorT<S> Add(const TensorT<S> &, const TensorT<S> &);            \
  template TensorT<S> Sub(const TensorT<S> &, const TensorT<S> &);            \
  template TensorT<S> Mul(const TensorT<S> &, const TensorT<S> &);            \
  template TensorT<S> Scale(const TensorT<S> &, S);                           \
  template TensorT<S> AddRow(const TensorT<S> &, const TensorT<S> &);         \
  template TensorT<S> Matmul(const TensorT<S> &, const TensorT<S> &);         \
  template TensorT<S> Transpose(const TensorT<S> &);                          \
  template TensorT<S> Conv1d(const TensorT<S> &, const TensorT<S> &,          \
                             const TensorT<S> &, int, int);                   \
  template TensorT<S> Relu(const TensorT<S> &);                               \
  template TensorT<S> BatchNorm(const TensorT<S> &, const TensorT<S> &,       \
                                const TensorT<S> &, BnStatsT<S> *, bool, S,   \
                                S);                                           \
  template TensorT<S> ColMean(const TensorT<S> &);                            \
  template TensorT<S> ColVar(const TensorT<S> &);                             \
  template TensorT<S> StatsPool(const TensorT<S> &);                          \
  template TensorT<S> L2NormalizeRows(const TensorT<S> &);                    \
  template TensorT<S> RowSum(const TensorT<S> &);                             \
  template TensorT<S> RowLogSumExp(const TensorT<S> &);                       \
  template TensorT<S> SoftmaxRows(const TensorT<S> &);                        \
  template TensorT<S> Exp(const TensorT<S> &);                                \
  template TensorT<S> Log(const TensorT<S> &);                                \
  template TensorT<S> Dot(const TensorT<S> &, const TensorT<S> &);            \
  template TensorT<S> ConcatRows(const std::vector<TensorT<S>> &);            \
  template TensorT<S> ConcatCols(const std::vector<TensorT<S>> &);            \
  template TensorT<S> TakeRows(const TensorT<S> &, const std::vector<int> &); \
  template TensorT<S> Reshape(const TensorT<S> &, const std::vector<int> &);  \
  template TensorT<S> SumAll(const TensorT<S> &);                             \
  template TensorT<S> MeanAll(const TensorT<S> &);

SPKCON_INSTANTIATE_OPS(float)
SPKCON_INSTANTIATE_OPS(double)

#undef SPKCON_INSTANTIATE_OPS

}  // namespace spkcon
