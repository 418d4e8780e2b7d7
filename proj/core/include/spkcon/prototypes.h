// core/include/spkcon/prototypes.h

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

#ifndef SPKCON_PROTOTYPES_H_
#define SPKCON_PROTOTYPES_H_

#include <vector>

#include "spkcon/rng.h"
#include "spkcon/tensor.h"

namespace spkcon {

// Clustered prototype state refreshed once per epoch: unit-norm centroids,
// per-cluster concentration estimates phi, and the assignment of every
// training sample to its cluster (the sample's pseudo-label).
struct PrototypeBank {
  int dim = 0;
  std::vector<std::vector<float>> centroids;  // M rows, unit norm
  std::vector<float> phi;                     // M clamped concentrations
  std::vector<int> assignments;               // one per dataset sample
  std::vector<int> cluster_sizes;             // M counts
  int epoch_tag = -1;                         // epoch the bank was built at

  int num_clusters() const { return static_cast<int>(centroids.size()); }
  bool ready() const { return num_clusters() > 0; }
};

struct KmeansOptions {
  int max_iters = 50;
  // Lloyd stops early when fewer than this fraction of assignments change.
  double min_change_frac = 0.001;
  // Attempts to reseed an empty cluster before giving up.
  int max_reseeds = 20;
};

// Spherical k-means on unit-norm rows: k-means++ seeding, Lloyd iterations
// with centroid renormalization, empty clusters reseeded from the farthest
// point of the largest cluster. Throws ClusterError when the dataset has
// fewer than M distinct points to seed from or reseeding keeps failing.
// inertia_trace, when non-null, receives sum_i (1 - v_i . c_{a(i)}) after
// each Lloyd iteration.
PrototypeBank SphericalKmeans(const std::vector<std::vector<float>> &points,
                              int num_clusters, Rng *rng,
                              const KmeansOptions &opts = {},
                              std::vector<double> *inertia_trace = nullptr);

// Cosine inertia of an assignment: sum_i (1 - v_i . c_{a(i)}).
double KmeansInertia(const std::vector<std::vector<float>> &points,
                     const PrototypeBank &bank);

// Unclamped concentration of one cluster: sum_dist / (z * log(z + eps)).
double RawConcentration(double sum_dist, int cluster_size, double eps = 0.01);

// Clamps raw concentrations to [0.01 * mean, 10 * mean] of the raw values.
std::vector<float> ClampConcentrations(const std::vector<double> &raw);

// Fills bank->phi: raw per-cluster concentrations (Euclidean distance to the
// centroid), then clamped to [0.01 * mean, 10 * mean] of the raw values.
void UpdateConcentrations(PrototypeBank *bank,
                          const std::vector<std::vector<float>> &points,
                          double eps = 0.01);

// One ProtoNCE term for a query row against its assigned prototype plus
// num_negatives prototypes sampled uniformly (with replacement) from the
// other clusters. Each prototype's logit is q . c / phi. query must be a
// [D] or [1 x D] tensor; a bank with a single cluster cannot provide
// negatives (ContractError).
template <typename S>
TensorT<S> ProtonceTerm(const TensorT<S> &query, const PrototypeBank &bank,
                        int assignment, int num_negatives, Rng *rng);

// Mean ProtoNCE term over the rows of queries ([N x D]) with per-row cluster
// assignments.
template <typename S>
TensorT<S> ProtonceMean(const TensorT<S> &queries,
                        const PrototypeBank &bank,
                        const std::vector<int> &assignments, int num_negatives,
                        Rng *rng);

// Joint objective for the prototype phase: MoCo InfoNCE plus alpha times the
// mean ProtoNCE term.
template <typename S>
TensorT<S> JointProtoLoss(const TensorT<S> &queries, const TensorT<S> &keys,
                          const TensorT<S> &queue, const PrototypeBank &bank,
                          const std::vector<int> &assignments,
                          int num_negatives, S tau, S alpha, Rng *rng);

}  // namespace spkcon

#endif  // SPKCON_PROTOTYPES_H_
