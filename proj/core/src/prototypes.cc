// core/src/prototypes.cc

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

#include "spkcon/prototypes.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "spkcon/common.h"
#include "spkcon/losses.h"
#include "spkcon/ops.h"

namespace spkcon {

namespace {

double DotVec(const std::vector<float> &a, const std::vector<float> &b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    s += static_cast<double>(a[i]) * b[i];
  return s;
}

// Squared Euclidean distance; for unit vectors this is 2 - 2 * dot.
double SqDist(const std::vector<float> &a, const std::vector<float> &b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

std::vector<std::vector<float>> KmeansPlusPlusSeed(
    const std::vector<std::vector<float>> &points, int m, Rng *rng) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<float>> centroids;
  centroids.reserve(m);
  centroids.push_back(points[rng->UniformInt(n)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centroids.size()) < m) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = SqDist(points[i], centroids[0]);
      for (size_t c = 1; c < centroids.size(); ++c)
        best = std::min(best, SqDist(points[i], centroids[c]));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0)
      throw ClusterError(
          "k-means++ seeding failed: fewer distinct points than clusters");
    double target = rng->Uniform() * total;
    int pick = n - 1;
    for (int i = 0; i < n; ++i) {
      target -= d2[i];
      if (target <= 0.0) {
        pick = i;
        break;
      }
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

void Renormalize(std::vector<float> *v) {
  double sq = 0.0;
  for (float x : *v) sq += static_cast<double>(x) * x;
  const double norm = std::sqrt(sq);
  if (norm < 1e-12) {
    v->clear();  // signals a degenerate centroid to the caller
    return;
  }
  for (float &x : *v) x = static_cast<float>(x / norm);
}

}  // namespace

PrototypeBank SphericalKmeans(const std::vector<std::vector<float>> &points,
                              int num_clusters, Rng *rng,
                              const KmeansOptions &opts,
                              std::vector<double> *inertia_trace) {
  const int n = static_cast<int>(points.size());
  if (num_clusters < 1)
    throw ClusterError("cluster count must be >= 1, got " +
                       std::to_string(num_clusters));
  if (n < num_clusters)
    throw ClusterError("cannot form " + std::to_string(num_clusters) +
                       " clusters from " + std::to_string(n) + " points");
  const int dim = static_cast<int>(points[0].size());
  for (const auto &p : points)
    if (static_cast<int>(p.size()) != dim)
      throw ClusterError("points have inconsistent dimensions");
  if (rng == nullptr) throw ContractError("spherical k-means: null rng");

  PrototypeBank bank;
  bank.dim = dim;
  bank.centroids = KmeansPlusPlusSeed(points, num_clusters, rng);
  bank.assignments.assign(n, -1);
  int reseeds = 0;

  auto assign_pass = [&]() -> int {
    int changed = 0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_dot = DotVec(points[i], bank.centroids[0]);
      for (int c = 1; c < num_clusters; ++c) {
        const double d = DotVec(points[i], bank.centroids[c]);
        if (d > best_dot) {
          best_dot = d;
          best = c;
        }
      }
      if (bank.assignments[i] != best) {
        bank.assignments[i] = best;
        ++changed;
      }
    }
    return changed;
  };

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    const int changed = assign_pass();
    if (iter > 0 &&
        changed < opts.min_change_frac * static_cast<double>(n))
      break;
    // Mean-and-renormalize centroid update.
    std::vector<std::vector<double>> sums(
        num_clusters, std::vector<double>(dim, 0.0));
    std::vector<int> sizes(num_clusters, 0);
    for (int i = 0; i < n; ++i) {
      const int a = bank.assignments[i];
      ++sizes[a];
      for (int d = 0; d < dim; ++d) sums[a][d] += points[i][d];
    }
    for (int c = 0; c < num_clusters; ++c) {
      if (sizes[c] > 0) {
        std::vector<float> mean(dim);
        for (int d = 0; d < dim; ++d)
          mean[d] = static_cast<float>(sums[c][d] / sizes[c]);
        Renormalize(&mean);
        if (!mean.empty()) {
          bank.centroids[c] = std::move(mean);
          continue;
        }
      }
      // Empty (or fully cancelling) cluster: reseed from the farthest point
      // of the currently largest cluster.
      if (++reseeds > opts.max_reseeds)
        throw ClusterError("could not keep " + std::to_string(num_clusters) +
                           " clusters populated after " +
                           std::to_string(opts.max_reseeds) + " reseeds");
      const int donor = static_cast<int>(
          std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      if (sizes[donor] < 2)
        throw ClusterError("no donor cluster available to reseed from");
      int far_point = -1;
      double far_dot = 2.0;
      for (int i = 0; i < n; ++i) {
        if (bank.assignments[i] != donor) continue;
        const double d = DotVec(points[i], bank.centroids[donor]);
        if (d < far_dot) {
          far_dot = d;
          far_point = i;
        }
      }
      bank.centroids[c] = points[far_point];
      bank.assignments[far_point] = c;
      --sizes[donor];
      ++sizes[c];
    }
    if (inertia_trace != nullptr)
      inertia_trace->push_back(KmeansInertia(points, bank));
  }
  // Final assignment pass so assignments match the final centroids.
  assign_pass();
  bank.cluster_sizes.assign(num_clusters, 0);
  for (int a : bank.assignments) ++bank.cluster_sizes[a];
  bank.phi.assign(num_clusters, 1.0f);
  return bank;
}

double KmeansInertia(const std::vector<std::vector<float>> &points,
                     const PrototypeBank &bank) {
  double total = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    total += 1.0 - DotVec(points[i], bank.centroids[bank.assignments[i]]);
  return total;
}

double RawConcentration(double sum_dist, int cluster_size, double eps) {
  if (cluster_size < 1)
    throw ContractError("concentration needs a nonempty cluster");
  return sum_dist /
         (cluster_size * std::log(static_cast<double>(cluster_size) + eps));
}

std::vector<float> ClampConcentrations(const std::vector<double> &raw) {
  if (raw.empty()) throw ContractError("no concentrations to clamp");
  double mean = 0.0;
  for (double r : raw) mean += r;
  mean /= static_cast<double>(raw.size());
  const double lo = 0.01 * mean;
  const double hi = 10.0 * mean;
  std::vector<float> out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i)
    out[i] = static_cast<float>(std::clamp(raw[i], lo, hi));
  return out;
}

void UpdateConcentrations(PrototypeBank *bank,
                          const std::vector<std::vector<float>> &points,
                          double eps) {
  if (bank == nullptr || !bank->ready())
    throw ContractError("concentration update on an empty bank");
  if (points.size() != bank->assignments.size())
    throw ContractError("concentration update: point count " +
                        std::to_string(points.size()) +
                        " != assignment count " +
                        std::to_string(bank->assignments.size()));
  const int m = bank->num_clusters();
  std::vector<double> sum_dist(m, 0.0);
  std::vector<int> sizes(m, 0);
  for (size_t i = 0; i < points.size(); ++i) {
    const int a = bank->assignments[i];
    sum_dist[a] += std::sqrt(SqDist(points[i], bank->centroids[a]));
    ++sizes[a];
  }
  std::vector<double> raw(m);
  for (int c = 0; c < m; ++c) {
    if (sizes[c] < 1)
      throw ClusterError("cluster " + std::to_string(c) +
                         " is empty during concentration update");
    raw[c] = RawConcentration(sum_dist[c], sizes[c], eps);
  }
  bank->phi = ClampConcentrations(raw);
  bank->cluster_sizes = sizes;
}

template <typename S>
TensorT<S> ProtonceTerm(const TensorT<S> &query, const PrototypeBank &bank,
                        int assignment, int num_negatives, Rng *rng) {
  if (!bank.ready()) throw ContractError("protonce: bank has no clusters");
  const int m = bank.num_clusters();
  if (m < 2)
    throw ContractError(
        "protonce: need at least 2 clusters to sample negatives");
  if (assignment < 0 || assignment >= m)
    throw ContractError("protonce: assignment " + std::to_string(assignment) +
                        " out of range for " + std::to_string(m) + " clusters");
  if (num_negatives < 1)
    throw ContractError("protonce: need at least one negative prototype");
  if (static_cast<int>(bank.phi.size()) != m)
    throw ContractError("protonce: bank has no concentrations");
  TensorT<S> q = query;
  if (q.rank() == 1)
    q = Reshape(q, {1, static_cast<int>(q.numel())});
  if (q.rank() != 2 || q.rows() != 1 || q.cols() != bank.dim)
    throw ContractError("protonce: query must be a single row of dim " +
                        std::to_string(bank.dim));
  // Prototype rows prescaled by 1/phi so one matmul yields q . c / phi.
  const int r = num_negatives;
  std::vector<S> proto(static_cast<size_t>(r + 1) * bank.dim);
  auto put_row = [&](int row, int cluster) {
    if (bank.phi[cluster] <= 0.0f)
      throw ContractError("protonce: nonpositive concentration in bank");
    const S inv_phi = S(1) / static_cast<S>(bank.phi[cluster]);
    for (int d = 0; d < bank.dim; ++d)
      proto[static_cast<size_t>(row) * bank.dim + d] =
          static_cast<S>(bank.centroids[cluster][d]) * inv_phi;
  };
  put_row(0, assignment);
  for (int i = 0; i < r; ++i) {
    // Uniform over the m - 1 clusters other than the assignment.
    const int u = static_cast<int>(rng->UniformInt(m - 1));
    put_row(i + 1, u >= assignment ? u + 1 : u);
  }
  TensorT<S> protos =
      TensorT<S>::FromData({r + 1, bank.dim}, std::move(proto));
  TensorT<S> logits = Matmul(q, Transpose(protos));  // [1 x (R+1)]
  std::vector<S> sel(static_cast<size_t>(r + 1), S(0));
  sel[0] = S(1);
  TensorT<S> pos =
      RowSum(Mul(logits, TensorT<S>::FromData({1, r + 1}, std::move(sel))));
  return Sub(RowLogSumExp(logits), pos);  // [1]
}

template <typename S>
TensorT<S> ProtonceMean(const TensorT<S> &queries, const PrototypeBank &bank,
                        const std::vector<int> &assignments, int num_negatives,
                        Rng *rng) {
  if (!queries.defined() || queries.rank() != 2)
    throw ContractError("protonce: queries must be [N x D]");
  const int n = queries.rows();
  if (static_cast<int>(assignments.size()) != n)
    throw ContractError("protonce: got " + std::to_string(assignments.size()) +
                        " assignments for " + std::to_string(n) + " rows");
  std::vector<TensorT<S>> terms;
  terms.reserve(n);
  for (int i = 0; i < n; ++i)
    terms.push_back(ProtonceTerm(TakeRows(queries, {i}), bank, assignments[i],
                                 num_negatives, rng));
  return MeanAll(ConcatRows(terms));
}

template <typename S>
TensorT<S> JointProtoLoss(const TensorT<S> &queries, const TensorT<S> &keys,
                          const TensorT<S> &queue, const PrototypeBank &bank,
                          const std::vector<int> &assignments,
                          int num_negatives, S tau, S alpha, Rng *rng) {
  TensorT<S> moco = MocoLoss(queries, keys, queue, tau);
  TensorT<S> proto =
      ProtonceMean(queries, bank, assignments, num_negatives, rng);
  return Add(moco, Scale(proto, alpha));
}

template TensorT<float> ProtonceTerm(const TensorT<float> &,
                                     const PrototypeBank &, int, int, Rng *);
template TensorT<double> ProtonceTerm(const TensorT<double> &,
                                      const PrototypeBank &, int, int, Rng *);
template TensorT<float> ProtonceMean(const TensorT<float> &,
                                     const PrototypeBank &,
                                     const std::vector<int> &, int, Rng *);
template TensorT<double> ProtonceMean(const TensorT<double> &,
                                      const PrototypeBank &,
                                      const std::vector<int> &, int, Rng *);
template TensorT<float> JointProtoLoss(const TensorT<float> &,
                                       const TensorT<float> &,
                                       const TensorT<float> &,
                                       const PrototypeBank &,
                                       const std::vector<int> &, int, float,
                                       float, Rng *);
template TensorT<double> JointProtoLoss(const TensorT<double> &,
                                        const TensorT<double> &,
                                        const TensorT<double> &,
                                        const PrototypeBank &,
                                        const std::vector<int> &, int, double,
                                        double, Rng *);

}  // namespace spkcon
