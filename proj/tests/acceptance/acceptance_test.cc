// tests/acceptance/acceptance_test.cc

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

// Acceptance harness: ten numbered criteria, one PASS/FAIL line each, exit
// code = number of failures. Criteria 1-7 are property checks against
// independent oracles implemented in this file (naive double loops, central
// finite differences, exhaustive threshold sweeps); criteria 8-10 train real
// models on the synthetic corpus and check the end-to-end trends.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "spkcon/augment.h"
#include "spkcon/checkpoint.h"
#include "spkcon/common.h"
#include "spkcon/config.h"
#include "spkcon/encoder.h"
#include "spkcon/losses.h"
#include "spkcon/metrics.h"
#include "spkcon/ops.h"
#include "spkcon/optim.h"
#include "spkcon/prototypes.h"
#include "spkcon/rng.h"
#include "spkcon/tensor.h"
#include "spkcon/toy.h"
#include "spkcon/trainer.h"
#include "spkcon/wav.h"

namespace spkcon {
namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Harness plumbing.

struct Outcome {
  bool pass = true;
  std::string detail;

  void Fail(const std::string &what) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
  void Note(const std::string &what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
  void Expect(bool ok, const std::string &what) {
    if (!ok) Fail(what);
  }
};

fs::path WorkDir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "spkcon-acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string ReadFileText(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Metrics-log loss column, one value per step line.
std::vector<double> LogLosses(const fs::path &log) {
  std::vector<double> out;
  std::istringstream in(ReadFileText(log));
  std::string line;
  while (std::getline(in, line)) {
    const size_t at = line.find("loss=");
    if (at == std::string::npos) continue;
    out.push_back(std::stod(line.substr(at + 5)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 1: central finite differences over every differentiable op and
// the full (tiny) encoder.

using DTensor = TensorT<double>;

DTensor RandMat(int rows, int cols, Rng *rng, bool rg = true) {
  std::vector<double> data(static_cast<size_t>(rows) * cols);
  for (double &v : data) v = rng->Normal();
  return DTensor::FromData({rows, cols}, std::move(data), rg);
}

DTensor RandVec(int n, Rng *rng, bool rg = true) {
  std::vector<double> data(n);
  for (double &v : data) v = rng->Normal();
  return DTensor::FromData({n}, std::move(data), rg);
}

// Max over leaf elements of the guarded relative error between the analytic
// gradient and a central difference. The primary step is 1e-4 (the pinned
// oracle); elements that miss the tolerance are retried at 1e-5, which
// rescues spurious ReLU-kink crossings (a genuinely wrong analytic gradient
// stays wrong at every step size).
double FdWorst(const std::function<DTensor()> &build,
               std::vector<DTensor> leaves, double tol) {
  for (auto &leaf : leaves) leaf.ZeroGrad();
  {
    DTensor loss = build();
    Backward(loss);
  }
  std::vector<std::vector<double>> analytic;
  analytic.reserve(leaves.size());
  for (auto &leaf : leaves)
    analytic.push_back(leaf.has_grad()
                           ? leaf.grad()
                           : std::vector<double>(leaf.values().size(), 0.0));

  const double steps[] = {1e-4, 1e-5};
  double worst = 0.0;
  for (size_t li = 0; li < leaves.size(); ++li) {
    std::vector<double> &v = leaves[li].raw()->values;
    for (size_t j = 0; j < v.size(); ++j) {
      const double orig = v[j];
      double best = 1e30;
      for (double h : steps) {
        v[j] = orig + h;
        const double f_plus = build().item();
        v[j] = orig - h;
        const double f_minus = build().item();
        v[j] = orig;
        const double numeric = (f_plus - f_minus) / (2.0 * h);
        const double a = analytic[li][j];
        const double denom = std::max({1.0, std::fabs(a), std::fabs(numeric)});
        best = std::min(best, std::fabs(a - numeric) / denom);
        if (best < tol) break;
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

Outcome Criterion1() {
  Outcome out;
  constexpr double kElem = 1e-4;   // elementwise ops
  constexpr double kComp = 1e-3;   // batch-norm, normalize, full encoder
  double worst_elem = 0.0, worst_comp = 0.0;

  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    auto elem = [&](const char *name, const std::function<DTensor()> &build,
                    std::vector<DTensor> leaves) {
      const double e = FdWorst(build, std::move(leaves), kElem);
      worst_elem = std::max(worst_elem, e);
      out.Expect(e < kElem, fmt::format("{} rel err {:.2e} (seed {})", name, e,
                                        seed));
    };
    auto comp = [&](const char *name, const std::function<DTensor()> &build,
                    std::vector<DTensor> leaves) {
      const double e = FdWorst(build, std::move(leaves), kComp);
      worst_comp = std::max(worst_comp, e);
      out.Expect(e < kComp, fmt::format("{} rel err {:.2e} (seed {})", name, e,
                                        seed));
    };

    DTensor a = RandMat(3, 4, &rng), b = RandMat(3, 4, &rng);
    DTensor r = RandMat(3, 4, &rng, false);
    elem("add", [&] { return SumAll(Mul(Add(a, b), r)); }, {a, b});
    elem("sub", [&] { return SumAll(Mul(Sub(a, b), r)); }, {a, b});
    elem("mul", [&] { return SumAll(Mul(Mul(a, b), r)); }, {a, b});
    elem("scale", [&] { return SumAll(Mul(Scale(a, 1.7), r)); }, {a});
    DTensor row = RandVec(4, &rng);
    elem("addrow", [&] { return SumAll(Mul(AddRow(a, row), r)); }, {a, row});

    DTensor m1 = RandMat(3, 5, &rng), m2 = RandMat(5, 2, &rng);
    DTensor rm = RandMat(3, 2, &rng, false);
    elem("matmul", [&] { return SumAll(Mul(Matmul(m1, m2), rm)); }, {m1, m2});
    DTensor rt = RandMat(5, 3, &rng, false);
    elem("transpose", [&] { return SumAll(Mul(Transpose(m1), rt)); }, {m1});

    DTensor cx = RandMat(9, 3, &rng);
    DTensor cw = RandMat(4, 9, &rng);  // kernel 3 * c_in 3
    DTensor cb = RandVec(4, &rng);
    DTensor cr = RandMat(5, 4, &rng, false);  // 9 - (3-1)*2 = 5 rows
    elem("conv1d",
         [&] { return SumAll(Mul(Conv1d(cx, cw, cb, 3, 2), cr)); },
         {cx, cw, cb});

    // ReLU inputs bounded away from the kink by more than the FD step.
    {
      std::vector<double> data(12);
      for (double &v : data) {
        v = rng->Normal();
        if (std::fabs(v) < 0.05) v = v < 0 ? v - 0.05 : v + 0.05;
      }
      DTensor x = DTensor::FromData({3, 4}, std::move(data), true);
      elem("relu", [&] { return SumAll(Mul(Relu(x), r)); }, {x});
    }

    DTensor sx = RandMat(6, 3, &rng);
    DTensor rv = RandVec(3, &rng, false);
    elem("colmean", [&] { return SumAll(Mul(ColMean(sx), rv)); }, {sx});
    elem("colvar", [&] { return SumAll(Mul(ColVar(sx), rv)); }, {sx});
    DTensor rn = RandVec(6, &rng, false);
    elem("rowsum", [&] { return SumAll(Mul(RowSum(sx), rn)); }, {sx});
    elem("rowlogsumexp",
         [&] { return SumAll(Mul(RowLogSumExp(sx), rn)); }, {sx});
    elem("softmax", [&] { return SumAll(Mul(SoftmaxRows(sx), RandMat(6, 3, &rng, false))); },
         {sx});

    {
      std::vector<double> data(8);
      for (double &v : data) v = rng->Uniform(-2.0, 2.0);
      DTensor x = DTensor::FromData({2, 4}, std::move(data), true);
      DTensor re = RandMat(2, 4, &rng, false);
      elem("exp", [&] { return SumAll(Mul(Exp(x), re)); }, {x});
    }
    {
      std::vector<double> data(8);
      for (double &v : data) v = rng->Uniform(0.2, 3.0);
      DTensor x = DTensor::FromData({2, 4}, std::move(data), true);
      DTensor rl = RandMat(2, 4, &rng, false);
      elem("log", [&] { return SumAll(Mul(Log(x), rl)); }, {x});
    }
    DTensor d1 = RandVec(5, &rng), d2 = RandVec(5, &rng);
    elem("dot", [&] { return Dot(d1, d2); }, {d1, d2});

    DTensor p1 = RandMat(2, 3, &rng), p2 = RandMat(3, 3, &rng);
    DTensor rc = RandMat(5, 3, &rng, false);
    elem("concat_rows",
         [&] { return SumAll(Mul(ConcatRows({p1, p2}), rc)); }, {p1, p2});
    DTensor q1 = RandMat(3, 2, &rng), q2 = RandMat(3, 4, &rng);
    DTensor rq = RandMat(3, 6, &rng, false);
    elem("concat_cols",
         [&] { return SumAll(Mul(ConcatCols({q1, q2}), rq)); }, {q1, q2});
    DTensor rg2 = RandMat(2, 3, &rng, false);
    elem("take_rows",
         [&] { return SumAll(Mul(TakeRows(p2, {2, 0}), rg2)); }, {p2});
    DTensor rr = RandMat(1, 6, &rng, false);
    elem("reshape",
         [&] { return SumAll(Mul(Reshape(p1, {1, 6}), rr)); }, {p1});
    elem("meanall", [&] { return MeanAll(Mul(sx, sx)); }, {sx});

    // Composites: batch-norm (training mode), statistics pooling, L2
    // normalization rows.
    {
      DTensor x = RandMat(5, 3, &rng);
      DTensor gamma = RandVec(3, &rng), beta = RandVec(3, &rng);
      DTensor rb = RandMat(5, 3, &rng, false);
      BnStatsT<double> stats(3);
      comp("batchnorm",
           [&] {
             return SumAll(
                 Mul(BatchNorm(x, gamma, beta, &stats, true), rb));
           },
           {x, gamma, beta});
    }
    {
      DTensor x = RandMat(6, 3, &rng);
      DTensor rs = RandVec(6, &rng, false);
      comp("statspool", [&] { return SumAll(Mul(StatsPool(x), rs)); }, {x});
    }
    {
      // Rows scaled to norms in [0.8, 2] so the epsilon guard stays idle.
      DTensor x = RandMat(4, 3, &rng);
      for (int i = 0; i < 4; ++i) {
        double nrm = 0.0;
        for (int j = 0; j < 3; ++j) {
          const double v = x.raw()->values[i * 3 + j];
          nrm += v * v;
        }
        const double want = 0.8 + 0.3 * i;
        const double g = want / std::sqrt(std::max(nrm, 1e-12));
        for (int j = 0; j < 3; ++j) x.raw()->values[i * 3 + j] *= g;
      }
      DTensor rl2 = RandMat(4, 3, &rng, false);
      comp("l2normalize",
           [&] { return SumAll(Mul(L2NormalizeRows(x), rl2)); }, {x});
      DTensor d = RandVec(3, &rng, false);
      comp("l2normalize_dot",
           [&] { return Dot(TakeRows(L2NormalizeRows(x), {1}), d); }, {x});
    }

    // Full tiny encoder, both outputs folded into one scalar.
    {
      TdnnConfig cfg;
      cfg.feat_dim = 5;
      cfg.channels = {6, 6, 6, 6, 10};
      cfg.embed_dim = 6;
      cfg.head_dim = 5;
      EncoderParamsT<double> params = EncoderParamsT<double>::Init(cfg, &rng);
      std::vector<DTensor> chunks = {RandMat(23, 5, &rng), RandMat(26, 5, &rng)};
      DTensor wp = RandMat(2, cfg.head_dim, &rng, false);
      DTensor we = RandMat(2, cfg.embed_dim, &rng, false);
      std::vector<DTensor> leaves = chunks;
      for (auto &[name, t] : params.NamedTensors()) leaves.push_back(t);
      comp("encoder",
           [&] {
             EmbeddingPairT<double> o = EncodeBatch(chunks, &params, true);
             return Add(SumAll(Mul(o.projection, wp)),
                        SumAll(Mul(o.embedding, we)));
           },
           leaves);
    }
    if (!out.pass) break;  // keep the first failing seed's message readable
  }
  if (out.pass)
    out.Note(fmt::format("worst elementwise {:.1e}, worst composite {:.1e}",
                         worst_elem, worst_comp));
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 2: naive double-loop loss oracles.

using Rows = std::vector<std::vector<double>>;

double DotRef(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rows UnitRows(int n, int d, Rng *rng) {
  Rows rows(n, std::vector<double>(d));
  for (auto &row : rows) {
    double nrm = 0.0;
    for (double &v : row) {
      v = rng->Normal();
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    for (double &v : row) v /= nrm;
  }
  return rows;
}

DTensor ToTensor(const Rows &rows, bool rg = false) {
  std::vector<double> flat;
  flat.reserve(rows.size() * rows[0].size());
  for (const auto &row : rows) flat.insert(flat.end(), row.begin(), row.end());
  return DTensor::FromData({static_cast<int>(rows.size()),
                            static_cast<int>(rows[0].size())},
                           std::move(flat), rg);
}

double NaiveSimclr(const Rows &va, const Rows &vb, double tau) {
  const int n = static_cast<int>(va.size());
  Rows all = va;
  all.insert(all.end(), vb.begin(), vb.end());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pos = DotRef(va[i], vb[i]) / tau;
    double denom = 0.0;
    for (int j = 0; j < 2 * n; ++j)
      if (j != i) denom += std::exp(DotRef(va[i], all[j]) / tau);
    total += -pos + std::log(denom);
  }
  return total / n;
}

double NaiveMoco(const Rows &q, const Rows &k, const Rows &queue, double tau) {
  const int n = static_cast<int>(q.size());
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pos = DotRef(q[i], k[i]) / tau;
    double denom = std::exp(pos);
    for (const auto &neg : queue) denom += std::exp(DotRef(q[i], neg) / tau);
    total += -pos + std::log(denom);
  }
  return total / n;
}

double NaiveSupcon(const Rows &va, const Rows &vb,
                   const std::vector<int> &labels, double tau) {
  const int n = static_cast<int>(va.size());
  Rows all = va;
  all.insert(all.end(), vb.begin(), vb.end());
  auto lab = [&](int j) { return labels[j % n]; };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double denom = 0.0;
    for (int j = 0; j < 2 * n; ++j)
      if (j != i) denom += std::exp(DotRef(all[i], all[j]) / tau);
    double li = 0.0;
    int positives = 0;
    for (int j = 0; j < 2 * n; ++j) {
      if (j == i || lab(j) != lab(i)) continue;
      li += std::log(std::exp(DotRef(all[i], all[j]) / tau) / denom);
      ++positives;
    }
    total += -li / positives;
  }
  return total / n;
}

// Mirrors the library's negative sampling: per row, `negs` draws of
// UniformInt(m-1) shifted past the assigned cluster.
double NaiveProtonce(const std::vector<double> &q, const PrototypeBank &bank,
                     int assignment, int negs, Rng *rng) {
  const int m = bank.num_clusters();
  auto logit = [&](int c) {
    double s = 0.0;
    for (int d = 0; d < bank.dim; ++d)
      s += q[d] * static_cast<double>(bank.centroids[c][d]) *
           (1.0 / static_cast<double>(bank.phi[c]));
    return s;
  };
  const double pos = logit(assignment);
  double denom = std::exp(pos);
  for (int i = 0; i < negs; ++i) {
    const int u = static_cast<int>(rng->UniformInt(m - 1));
    denom += std::exp(logit(u >= assignment ? u + 1 : u));
  }
  return std::log(denom) - pos;
}

PrototypeBank RandomBank(int m, int d, Rng *rng) {
  PrototypeBank bank;
  bank.dim = d;
  Rows cents = UnitRows(m, d, rng);
  for (auto &c : cents)
    bank.centroids.emplace_back(c.begin(), c.end());
  for (int i = 0; i < m; ++i)
    bank.phi.push_back(static_cast<float>(rng->Uniform(0.05, 1.2)));
  bank.cluster_sizes.assign(m, 1);
  return bank;
}

Outcome Criterion2() {
  Outcome out;
  constexpr double kTol = 1e-6;
  double worst = 0.0;
  auto check = [&](const char *name, int i, double lib, double ref) {
    const double err = std::fabs(lib - ref);
    worst = std::max(worst, err);
    out.Expect(err <= kTol, fmt::format("{} instance {}: |{:.9f} - {:.9f}| = "
                                        "{:.2e}",
                                        name, i, lib, ref, err));
  };

  for (int i = 0; i < 100 && out.pass; ++i) {
    Rng rng(9000 + i);
    const int n = 2 + static_cast<int>(rng.UniformInt(15));   // 2..16
    const int d = 4 + static_cast<int>(rng.UniformInt(9));    // 4..12
    const int k = 1 + static_cast<int>(rng.UniformInt(64));   // 1..64
    const int m = 2 + static_cast<int>(rng.UniformInt(7));    // 2..8
    const double tau = rng.Uniform(0.05, 0.5);
    const Rows va = UnitRows(n, d, &rng), vb = UnitRows(n, d, &rng);
    const Rows queue = UnitRows(k, d, &rng);
    std::vector<int> labels(n);
    for (int &l : labels) l = static_cast<int>(rng.UniformInt(4));

    check("simclr", i, SimclrLoss(ToTensor(va), ToTensor(vb), tau).item(),
          NaiveSimclr(va, vb, tau));
    check("moco", i,
          MocoLoss(ToTensor(va), ToTensor(vb), ToTensor(queue), tau).item(),
          NaiveMoco(va, vb, queue, tau));
    check("supcon", i,
          SupconLoss(ToTensor(va), ToTensor(vb), labels, tau).item(),
          NaiveSupcon(va, vb, labels, tau));

    const PrototypeBank bank = RandomBank(m, d, &rng);
    const int assignment = static_cast<int>(rng.UniformInt(m));
    const int negs = 1 + static_cast<int>(rng.UniformInt(16));
    {
      Rng lib_rng(77000 + i), ref_rng(77000 + i);
      check("protonce_term", i,
            ProtonceTerm(ToTensor({va[0]}), bank, assignment, negs, &lib_rng)
                .item(),
            NaiveProtonce(va[0], bank, assignment, negs, &ref_rng));
    }
    {
      std::vector<int> assigns(n);
      for (int &a : assigns) a = static_cast<int>(rng.UniformInt(m));
      Rng lib_rng(78000 + i), ref_rng(78000 + i);
      const double alpha = rng.Uniform(0.0, 1.0);
      const double lib =
          JointProtoLoss(ToTensor(va), ToTensor(vb), ToTensor(queue), bank,
                         assigns, negs, tau, alpha, &lib_rng)
              .item();
      double proto = 0.0;
      for (int r = 0; r < n; ++r)
        proto += NaiveProtonce(va[r], bank, assigns[r], negs, &ref_rng);
      check("joint", i, lib, NaiveMoco(va, vb, queue, tau) + alpha * proto / n);
    }
    {
      std::vector<int> semi_labels = labels;
      for (int &l : semi_labels)
        if (rng.Uniform() < 0.5) l = -1;
      const double lambda = rng.Uniform(0.5, 9.0);
      const double lib = SemiLoss(ToTensor(va), ToTensor(vb), semi_labels,
                                  ToTensor(queue), tau, lambda)
                             .item();
      Rows lva, lvb;
      std::vector<int> ll;
      for (int r = 0; r < n; ++r) {
        if (semi_labels[r] < 0) continue;
        lva.push_back(va[r]);
        lvb.push_back(vb[r]);
        ll.push_back(semi_labels[r]);
      }
      const double sup = lva.empty() ? 0.0 : NaiveSupcon(lva, lvb, ll, tau);
      check("semi", i, lib, sup + lambda * NaiveMoco(va, vb, queue, tau));
    }
  }
  if (out.pass) out.Note(fmt::format("worst |lib - naive| {:.1e}", worst));
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 3: structural reductions.

Outcome Criterion3() {
  Outcome out;
  for (int i = 0; i < 25; ++i) {
    Rng rng(3100 + i);
    const int n = 2 + static_cast<int>(rng.UniformInt(10));
    const int d = 6;
    const Rows va = UnitRows(n, d, &rng), vb = UnitRows(n, d, &rng);
    const Rows queue = UnitRows(8, d, &rng);
    const double tau = rng.Uniform(0.05, 0.4);

    // SupCon with all-distinct labels degenerates to SimCLR.
    std::vector<int> distinct(n);
    for (int j = 0; j < n; ++j) distinct[j] = j;
    const double sup =
        SupconLoss(ToTensor(va), ToTensor(vb), distinct, tau).item();
    const double sim = SimclrLoss(ToTensor(va), ToTensor(vb), tau).item();
    out.Expect(std::fabs(sup - sim) <= 1e-6,
               fmt::format("supcon(distinct) {:.9f} != simclr {:.9f}", sup,
                           sim));

    // joint with alpha = 0 is exactly MoCo.
    const PrototypeBank bank = RandomBank(4, d, &rng);
    std::vector<int> assigns(n, 1);
    Rng joint_rng(41);
    const double joint =
        JointProtoLoss(ToTensor(va), ToTensor(vb), ToTensor(queue), bank,
                       assigns, 3, tau, 0.0, &joint_rng)
            .item();
    const double moco =
        MocoLoss(ToTensor(va), ToTensor(vb), ToTensor(queue), tau).item();
    out.Expect(std::fabs(joint - moco) <= 1e-12,
               fmt::format("joint(alpha=0) {:.12f} != moco {:.12f}", joint,
                           moco));

    // semi with no labels is exactly lambda * MoCo.
    const double lambda = rng.Uniform(0.5, 9.0);
    std::vector<int> unlabeled(n, -1);
    const double semi = SemiLoss(ToTensor(va), ToTensor(vb), unlabeled,
                                 ToTensor(queue), tau, lambda)
                            .item();
    out.Expect(std::fabs(semi - lambda * moco) <= 1e-12,
               fmt::format("semi(no labels) {:.12f} != lambda*moco {:.12f}",
                           semi, lambda * moco));

    // SimCLR with a single pair has an empty negative set: loss 0.
    const double single =
        SimclrLoss(ToTensor({va[0]}), ToTensor({vb[0]}), tau).item();
    out.Expect(std::fabs(single) <= 1e-12,
               fmt::format("simclr(N=1) = {:.12f} != 0", single));
    if (!out.pass) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 4: queue / EMA state machine.

Outcome Criterion4() {
  Outcome out;

  // FIFO order, capacity bound and unit-norm contract under 1000 pushes.
  {
    Rng rng(444);
    const int cap = 17, dim = 6;
    NegativeQueue queue(cap);
    std::vector<std::vector<float>> ref;
    int pushes = 0;
    while (pushes < 1000) {
      const int burst =
          rng.Uniform() < 0.3 ? 2 + static_cast<int>(rng.UniformInt(3)) : 1;
      Rows rows = UnitRows(burst, dim, &rng);
      if (burst == 1) {
        std::vector<float> row(rows[0].begin(), rows[0].end());
        queue.Push(row);
        ref.push_back(row);
      } else {
        std::vector<float> flat;
        for (auto &r : rows)
          for (double v : r) flat.push_back(static_cast<float>(v));
        queue.PushRows(
            Tensor::FromData({burst, dim}, std::move(flat)));
        for (auto &r : rows) ref.emplace_back(r.begin(), r.end());
      }
      pushes += burst;

      if (queue.size() != std::min<int>(pushes, cap)) {
        out.Fail(fmt::format("size {} after {} pushes (cap {})", queue.size(),
                             pushes, cap));
        break;
      }
      const Tensor snap = queue.Snapshot();
      const size_t base = ref.size() - queue.size();
      for (int r = 0; r < queue.size(); ++r) {
        double norm = 0.0;
        for (int c = 0; c < dim; ++c) {
          const float v = snap.values()[static_cast<size_t>(r) * dim + c];
          norm += static_cast<double>(v) * v;
          if (v != ref[base + r][c]) {
            out.Fail(fmt::format("FIFO mismatch at row {} after {} pushes", r,
                                 pushes));
            break;
          }
        }
        if (std::fabs(std::sqrt(norm) - 1.0) > 1e-5) {
          out.Fail(fmt::format("row norm {} after {} pushes", std::sqrt(norm),
                               pushes));
        }
        if (!out.pass) break;
      }
      if (!out.pass) break;
    }
    bool threw = false;
    try {
      queue.Push(std::vector<float>(dim, 0.7f));
    } catch (const ContractError &) {
      threw = true;
    }
    out.Expect(threw, "non-unit push did not raise ContractError");
  }

  // EMA closed form at double precision.
  {
    TdnnConfig cfg;
    cfg.feat_dim = 4;
    cfg.channels = {5, 5, 5, 5, 8};
    cfg.embed_dim = 5;
    cfg.head_dim = 4;
    Rng rng(555);
    EncoderParamsT<double> q = EncoderParamsT<double>::Init(cfg, &rng);
    EncoderParamsT<double> k = q.Clone(false);
    for (auto &[name, t] : k.NamedTensors())
      for (double &v : t.raw()->values) v += rng.Normal();
    for (auto &[name, stats] : q.NamedStats())
      for (double &v : *stats) v = rng.Uniform(0.1, 2.0);

    std::map<std::string, std::vector<double>> k0;
    for (auto &[name, t] : k.NamedTensors()) k0[name] = t.values();
    const double m = 0.731;
    EmaUpdate(&k, q, m);
    auto qt = q.NamedTensors();
    double worst = 0.0;
    for (auto &[name, t] : k.NamedTensors()) {
      const std::vector<double> &qv =
          std::find_if(qt.begin(), qt.end(),
                       [&, n = name](const auto &p) { return p.first == n; })
              ->second.values();
      for (size_t j = 0; j < qv.size(); ++j) {
        const double want = m * k0[name][j] + (1.0 - m) * qv[j];
        worst = std::max(worst, std::fabs(t.values()[j] - want));
      }
    }
    out.Expect(worst <= 1e-12,
               fmt::format("EMA closed-form error {:.2e}", worst));
    for (auto &[name, stats] : k.NamedStats()) {
      auto qs = q.NamedStats();
      const std::vector<double> *src =
          std::find_if(qs.begin(), qs.end(),
                       [&, n = name](const auto &p) { return p.first == n; })
              ->second;
      out.Expect(*stats == *src, "running stats not mirrored");
    }
  }

  // theta_k gets zero gradient across a full training step.
  {
    TdnnConfig cfg;
    cfg.feat_dim = 6;
    cfg.channels = {8, 8, 8, 8, 12};
    cfg.embed_dim = 8;
    cfg.head_dim = 6;
    Rng rng(666);
    EncoderParams qp = EncoderParams::Init(cfg, &rng);
    EncoderParams kp = qp.Clone(false);
    std::map<std::string, std::vector<float>> k0;
    for (auto &[name, t] : kp.NamedTensors()) k0[name] = t.values();

    auto chunk = [&](int t) {
      std::vector<float> data(static_cast<size_t>(t) * cfg.feat_dim);
      for (float &v : data) v = static_cast<float>(rng.Normal());
      return Tensor::FromData({t, cfg.feat_dim}, std::move(data));
    };
    std::vector<Tensor> va = {chunk(25), chunk(28)};
    std::vector<Tensor> vb = {chunk(26), chunk(24)};

    NegativeQueue queue(8);
    for (auto &row : UnitRows(5, cfg.head_dim, &rng))
      queue.Push(std::vector<float>(row.begin(), row.end()));

    qp.ZeroGrads();
    EmbeddingPair qo = EncodeBatch(va, &qp, true);
    EmbeddingPair ko = EncodeBatch(vb, &kp, false);
    Tensor loss =
        MocoLoss(qo.projection, ko.projection, queue.Snapshot(), 0.1f);
    Backward(loss);

    bool q_has = false;
    for (auto &[name, t] : qp.NamedTensors())
      if (t.has_grad()) q_has = true;
    out.Expect(q_has, "query encoder received no gradient");
    for (auto &[name, t] : kp.NamedTensors()) {
      if (!t.has_grad()) continue;
      for (float g : t.grad())
        if (g != 0.0f) {
          out.Fail(fmt::format("theta_k '{}' received gradient", name));
          break;
        }
    }

    std::vector<NamedParam> params;
    for (auto &[name, t] : qp.NamedTensors()) params.push_back({name, t});
    SgdMomentum opt(0.9f);
    opt.Step(params, 0.05f);
    for (auto &[name, t] : kp.NamedTensors())
      out.Expect(t.values() == k0[name],
                 fmt::format("theta_k '{}' changed before EMA", name));
    EmaUpdate(&kp, qp, 0.9f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 5: EER / minDCF against an exhaustive sweep oracle.

struct OpPoint {
  int64_t miss = 0, fa = 0;
};

// Operating points at thresholds {min - 1} and every raw score, accept iff
// score > threshold, by literal counting.
std::vector<OpPoint> OpsRef(const std::vector<float> &tg,
                            const std::vector<float> &nt) {
  std::vector<float> thresholds;
  thresholds.push_back(
      std::min(*std::min_element(tg.begin(), tg.end()),
               *std::min_element(nt.begin(), nt.end())) -
      1.0f);
  thresholds.insert(thresholds.end(), tg.begin(), tg.end());
  thresholds.insert(thresholds.end(), nt.begin(), nt.end());
  std::vector<OpPoint> ops;
  for (float th : thresholds) {
    OpPoint op;
    for (float s : tg)
      if (!(s > th)) ++op.miss;
    for (float s : nt)
      if (s > th) ++op.fa;
    ops.push_back(op);
  }
  return ops;
}

double EerRef(const std::vector<float> &tg, const std::vector<float> &nt) {
  std::vector<OpPoint> ops = OpsRef(tg, nt);
  std::sort(ops.begin(), ops.end(), [](const OpPoint &a, const OpPoint &b) {
    return a.miss != b.miss ? a.miss < b.miss : a.fa > b.fa;
  });
  const double ntg = static_cast<double>(tg.size());
  const double nnt = static_cast<double>(nt.size());
  for (size_t i = 0; i + 1 < ops.size(); ++i) {
    const OpPoint &lo = ops[i], &hi = ops[i + 1];
    // frr crosses far between consecutive points?
    const double r1 = lo.miss / ntg, a1 = lo.fa / nnt;
    const double r2 = hi.miss / ntg, a2 = hi.fa / nnt;
    if (r1 == a1) return r1;
    if (r1 < a1 && r2 >= a2) {
      if (r2 == a2) return r2;
      const double t = (a1 - r1) / ((a1 - r1) + (r2 - a2));
      return r1 + t * (r2 - r1);
    }
  }
  const OpPoint &last = ops.back();
  return 0.5 * (last.miss / ntg + last.fa / nnt);
}

double MinDcfRef(const std::vector<float> &tg, const std::vector<float> &nt,
                 double p, double cm, double cf) {
  double best = 1e300;
  for (const OpPoint &op : OpsRef(tg, nt)) {
    const double cost = cm * p * (static_cast<double>(op.miss) / tg.size()) +
                        cf * (1.0 - p) * (static_cast<double>(op.fa) / nt.size());
    best = std::min(best, cost);
  }
  return best / std::min(cm * p, cf * (1.0 - p));
}

ScoredTrials MakeScored(const std::vector<float> &tg,
                        const std::vector<float> &nt) {
  ScoredTrials s;
  for (float v : tg) {
    s.scores.push_back(v);
    s.targets.push_back(1);
  }
  for (float v : nt) {
    s.scores.push_back(v);
    s.targets.push_back(0);
  }
  return s;
}

Outcome Criterion5() {
  Outcome out;

  // Hand case from the contract: EER = 1/3.
  {
    const MetricResult eer = Eer(MakeScored({0.6f, 0.4f, 0.8f},
                                            {0.5f, 0.3f, 0.2f}));
    out.Expect(std::fabs(eer.value - 1.0 / 3.0) <= 1e-12,
               fmt::format("hand case EER {:.9f} != 1/3", eer.value));
  }

  double worst = 0.0;
  for (int i = 0; i < 1000 && out.pass; ++i) {
    Rng rng(5200 + i);
    const int ntg = 1 + static_cast<int>(rng.UniformInt(40));
    const int nnt = 1 + static_cast<int>(rng.UniformInt(40));
    const bool quantize = i % 2 == 0;  // heavy ties on half the lists
    auto draw = [&](double shift) {
      float v = static_cast<float>(rng.Normal() + shift);
      if (quantize) v = std::round(v * 10.0f) / 10.0f;
      return v;
    };
    std::vector<float> tg, nt;
    for (int j = 0; j < ntg; ++j) tg.push_back(draw(0.5));
    for (int j = 0; j < nnt; ++j) nt.push_back(draw(-0.5));

    const ScoredTrials scored = MakeScored(tg, nt);
    const double eer = Eer(scored).value;
    const double ref = EerRef(tg, nt);
    worst = std::max(worst, std::fabs(eer - ref));
    out.Expect(std::fabs(eer - ref) <= 1e-12,
               fmt::format("list {}: EER {:.12f} != oracle {:.12f}", i, eer,
                           ref));

    DcfParams params;
    params.p_target = i % 3 == 0 ? 0.5 : 0.01;
    const double dcf = MinDcf(scored, params).value;
    const double dref = MinDcfRef(tg, nt, params.p_target, 1.0, 1.0);
    worst = std::max(worst, std::fabs(dcf - dref));
    out.Expect(std::fabs(dcf - dref) <= 1e-12,
               fmt::format("list {}: minDCF {:.12f} != oracle {:.12f}", i, dcf,
                           dref));

    // Monotone-transform invariance on every 10th list.
    if (i % 10 == 0) {
      auto apply = [&](float (*f)(float)) {
        std::vector<float> tg2, nt2;
        for (float v : tg) tg2.push_back(f(v));
        for (float v : nt) nt2.push_back(f(v));
        const ScoredTrials s2 = MakeScored(tg2, nt2);
        out.Expect(std::fabs(Eer(s2).value - eer) <= 1e-12,
                   fmt::format("list {}: EER not transform-invariant", i));
        out.Expect(std::fabs(MinDcf(s2, params).value - dcf) <= 1e-12,
                   fmt::format("list {}: minDCF not transform-invariant", i));
      };
      apply([](float v) { return 2.0f * v + 1.0f; });
      apply([](float v) { return v * v * v; });
      apply([](float v) { return std::tanh(v); });
    }
  }
  if (out.pass) out.Note(fmt::format("worst |lib - oracle| {:.1e}", worst));
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 6: augmentation calibration.

Waveform ColoredNoise(int n, Rng *rng) {
  Waveform w;
  w.sample_rate = 16000;
  w.samples.resize(n);
  double prev = 0.0;
  for (float &v : w.samples) {
    prev = 0.9 * prev + 0.3 * rng->Normal();
    v = static_cast<float>(prev);
  }
  return w;
}

double PowerOf(const std::vector<float> &x) {
  double p = 0.0;
  for (float v : x) p += static_cast<double>(v) * v;
  return p / std::max<size_t>(1, x.size());
}

Outcome Criterion6() {
  Outcome out;
  Rng rng(6600);

  // Requested vs realized SNR over the three paper lists.
  const std::vector<std::vector<double>> lists = {
      {0, 5, 10, 15}, {5, 8, 10, 15}, {13, 15, 17, 20}};
  double worst_db = 0.0;
  for (const auto &list : lists) {
    for (double snr : list) {
      for (int rep = 0; rep < 4; ++rep) {
        Waveform speech = ColoredNoise(16000 + rep * 3000, &rng);
        // Shorter and longer noises exercise looping and cropping.
        Waveform noise = ColoredNoise(rep % 2 == 0 ? 9001 : 26000, &rng);
        const Waveform mixed = AddNoise(speech, noise, snr);
        std::vector<float> added(mixed.samples.size());
        for (size_t i = 0; i < added.size(); ++i)
          added[i] = mixed.samples[i] - speech.samples[i];
        const double realized =
            10.0 * std::log10(PowerOf(speech.samples) / PowerOf(added));
        worst_db = std::max(worst_db, std::fabs(realized - snr));
        out.Expect(std::fabs(realized - snr) <= 0.1,
                   fmt::format("snr {} realized {:.3f}", snr, realized));
      }
    }
  }

  // Reverb application rate at 80% +/- 1.5% over 10k draws.
  {
    AugmentCorpus corpus;
    Rng rir_rng(12);
    for (int i = 0; i < 3; ++i) corpus.rirs.push_back(SyntheticRir(&rir_rng));
    corpus.noise.push_back(ColoredNoise(8000, &rng));
    corpus.music.push_back(ColoredNoise(8000, &rng));
    corpus.babble.push_back(ColoredNoise(8000, &rng));
    const WavAugConfig cfg;
    int reverbs = 0;
    for (int i = 0; i < 10000; ++i)
      reverbs += DrawWavAug(corpus, cfg, &rng).reverb ? 1 : 0;
    const double rate = reverbs / 10000.0;
    out.Expect(std::fabs(rate - 0.8) <= 0.015,
               fmt::format("reverb rate {:.4f}", rate));
    if (out.pass) out.Note(fmt::format("reverb rate {:.3f}", rate));
  }

  // Unit-impulse RIR is an identity.
  {
    Waveform speech = ColoredNoise(12000, &rng);
    Waveform rir;
    rir.sample_rate = 16000;
    rir.samples.assign(64, 0.0f);
    rir.samples[0] = 1.0f;
    const Waveform echoed = AddReverb(speech, rir);
    double worst = 0.0;
    for (size_t i = 0; i < speech.samples.size(); ++i)
      worst = std::max(worst, static_cast<double>(std::fabs(
                                  echoed.samples[i] - speech.samples[i])));
    out.Expect(worst <= 1e-6,
               fmt::format("unit-impulse deviation {:.2e}", worst));
  }
  if (out.pass) out.Note(fmt::format("worst SNR error {:.3f} dB", worst_db));
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 7: clustering.

Outcome Criterion7() {
  Outcome out;

  // Three well-separated blobs on the sphere recovered at 100% purity with a
  // non-increasing inertia trace.
  {
    Rng rng(777);
    const int dim = 12, per = 50;
    std::vector<std::vector<float>> points;
    std::vector<int> truth;
    for (int blob = 0; blob < 3; ++blob) {
      for (int i = 0; i < per; ++i) {
        std::vector<double> v(dim, 0.0);
        v[blob] = 1.0;
        for (int d = 0; d < dim; ++d) v[d] += 0.15 * rng.Normal();
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        std::vector<float> f(dim);
        for (int d = 0; d < dim; ++d)
          f[d] = static_cast<float>(v[d] / nrm);
        points.push_back(std::move(f));
        truth.push_back(blob);
      }
    }
    std::vector<double> trace;
    const PrototypeBank bank = SphericalKmeans(points, 3, &rng, {}, &trace);
    int pure = 0;
    for (int c = 0; c < 3; ++c) {
      std::map<int, int> votes;
      for (size_t i = 0; i < points.size(); ++i)
        if (bank.assignments[i] == c) ++votes[truth[i]];
      int best = 0;
      for (auto &[label, n] : votes) best = std::max(best, n);
      pure += best;
    }
    out.Expect(pure == static_cast<int>(points.size()),
               fmt::format("purity {}/{}", pure, points.size()));
    for (size_t i = 0; i + 1 < trace.size(); ++i)
      out.Expect(trace[i + 1] <= trace[i] + 1e-9,
                 fmt::format("inertia rose at iteration {}", i + 1));
  }

  // Concentration hand case: Z=100, mean distance 0.5, eps=0.01.
  {
    const double phi = RawConcentration(100 * 0.5, 100, 0.01);
    out.Expect(std::fabs(phi - 0.10857) <= 1e-4,
               fmt::format("phi hand case {:.6f}", phi));
    out.Note(fmt::format("phi(Z=100,d=0.5) = {:.5f}", phi));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria 8-10: trend reproduction on the synthetic corpus.

constexpr uint64_t kCorpusSeed = 42;
constexpr uint64_t kInitSeed = 23;

struct TrendRecipe {
  int epochs = 200;
  int batch_size = 16;
  int queue_size = 64;
  double tau = 0.1;
  double ema = 0.9;
  double lr_start = 0.05;
  int chunk_min = 60;
  int chunk_max = 120;
  int proto_warmup = 80;   // 40% of epochs
  int proto_clusters = 20;
  int semi_epochs = 60;
  double semi_lambda = 9.0;
  double labeled_fraction = 0.25;
};
constexpr TrendRecipe kRecipe;

const ToyOutputs &Corpus() {
  static ToyOutputs corpus = [] {
    return GenerateToyCorpus((WorkDir() / "corpus").string(), kCorpusSeed);
  }();
  return corpus;
}

RunConfig TrendConfig(const std::string &out_dir, LossKind kind, uint64_t seed,
                      bool wav_aug) {
  const ToyOutputs &c = Corpus();
  RunConfig cfg;
  cfg.train_manifest = c.train_manifest;
  cfg.aug_manifest = c.aug_manifest;
  cfg.eval_manifest = c.eval_manifest;
  cfg.trials = c.trials;
  cfg.out_dir = (WorkDir() / out_dir).string();
  cfg.loss = kind;
  cfg.tau = kRecipe.tau;
  cfg.queue_size = kRecipe.queue_size;
  cfg.ema_momentum = kRecipe.ema;
  cfg.epochs = kRecipe.epochs;
  cfg.batch_size = kRecipe.batch_size;
  cfg.lr_start = kRecipe.lr_start;
  cfg.chunk_min = kRecipe.chunk_min;
  cfg.chunk_max = kRecipe.chunk_max;
  cfg.wav_aug = wav_aug;
  cfg.seed = seed;
  cfg.keep_checkpoints = 2;
  cfg.clusters = kRecipe.proto_clusters;
  cfg.warmup_epochs = kRecipe.proto_warmup;
  return cfg;
}

double RunAndEval(const RunConfig &cfg, Outcome *out, double *minutes) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult res = Train(cfg);
  const EvalReport report =
      EvaluateCheckpoint(res.last_checkpoint, cfg.eval_manifest, cfg.trials);
  *minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                           t0)
                 .count() /
             60.0;
  out->Expect(*minutes < 15.0,
              fmt::format("run {} took {:.1f} min", cfg.out_dir, *minutes));
  return report.eer;
}

Outcome Criterion8(std::map<std::string, double> *shared) {
  Outcome out;

  // (a) Untrained encoder scores near chance.
  const std::string init = (WorkDir() / "init.spkc").string();
  SaveInitCheckpoint(init, "tdnn-tiny", kInitSeed);
  const EvalReport null_report =
      EvaluateCheckpoint(init, Corpus().eval_manifest, Corpus().trials);
  out.Expect(null_report.eer >= 0.40 && null_report.eer <= 0.60,
             fmt::format("untrained EER {:.1f}% outside [40,60]",
                         100 * null_report.eer));

  // (b) MoCo without augmentation.
  double minutes = 0.0;
  const double eer_plain = RunAndEval(
      TrendConfig("run-moco-plain", LossKind::kMoco, 11, false), &out,
      &minutes);
  out.Expect(eer_plain < 0.40,
             fmt::format("MoCo plain EER {:.1f}%", 100 * eer_plain));

  // (c) MoCo + WavAug.
  const double eer_aug = RunAndEval(
      TrendConfig("run-moco-aug", LossKind::kMoco, 11, true), &out, &minutes);
  out.Expect(eer_aug < 0.20,
             fmt::format("MoCo+WavAug EER {:.1f}%", 100 * eer_aug));

  // (d) Adding ProtoNCE is non-inferior (within 2 points of (c)).
  const double eer_proto = RunAndEval(
      TrendConfig("run-proto", LossKind::kProto, 11, true), &out, &minutes);
  out.Expect(eer_proto <= eer_aug + 0.02,
             fmt::format("ProtoNCE EER {:.1f}% vs WavAug {:.1f}%",
                         100 * eer_proto, 100 * eer_aug));

  (*shared)["eer_aug"] = eer_aug;
  out.Note(fmt::format(
      "untrained {:.1f}%, plain {:.1f}%, aug {:.1f}%, proto {:.1f}%",
      100 * null_report.eer, 100 * eer_plain, 100 * eer_aug, 100 * eer_proto));
  return out;
}

// 15% of the speakers keep their labels; the rest become unlabeled.
std::string SemiManifest() {
  const fs::path path = WorkDir() / "train_semi.tsv";
  std::ifstream in(Corpus().train_manifest);
  std::ofstream out(path);
  std::string line;
  std::set<std::string> speakers;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    lines.push_back(line);
    const size_t a = line.find('\t');
    const size_t b = line.find('\t', a + 1);
    speakers.insert(line.substr(a + 1, b - a - 1));
  }
  const int keep = std::max(
      1, static_cast<int>(std::lround(0.15 * static_cast<int>(speakers.size()))));
  std::set<std::string> labeled(speakers.begin(),
                                std::next(speakers.begin(), keep));
  for (const std::string &l : lines) {
    const size_t a = l.find('\t');
    const size_t b = l.find('\t', a + 1);
    const std::string spk = l.substr(a + 1, b - a - 1);
    if (labeled.count(spk)) {
      out << l << "\n";
    } else {
      out << l.substr(0, a) << "\t-" << l.substr(b) << "\n";
    }
  }
  return path.string();
}

Outcome Criterion9() {
  Outcome out;
  const std::string manifest = SemiManifest();
  const uint64_t seeds[] = {101, 102, 103};
  std::vector<double> semi, moco;
  for (uint64_t seed : seeds) {
    for (bool use_semi : {true, false}) {
      RunConfig cfg = TrendConfig(
          fmt::format("run-{}-{}", use_semi ? "semi" : "mocobase", seed),
          use_semi ? LossKind::kSemi : LossKind::kMoco, seed, true);
      cfg.train_manifest = manifest;
      cfg.epochs = kRecipe.semi_epochs;
      cfg.lambda = kRecipe.semi_lambda;
      cfg.labeled_fraction = kRecipe.labeled_fraction;
      double minutes = 0.0;
      const double eer = RunAndEval(cfg, &out, &minutes);
      (use_semi ? semi : moco).push_back(eer);
    }
  }
  std::sort(semi.begin(), semi.end());
  std::sort(moco.begin(), moco.end());
  out.Expect(semi[1] < moco[1],
             fmt::format("median semi EER {:.1f}% !< moco {:.1f}%",
                         100 * semi[1], 100 * moco[1]));
  out.Note(fmt::format(
      "semi medians {:.1f}/{:.1f}/{:.1f}%, moco {:.1f}/{:.1f}/{:.1f}%",
      100 * semi[0], 100 * semi[1], 100 * semi[2], 100 * moco[0],
      100 * moco[1], 100 * moco[2]));
  return out;
}

Outcome Criterion10() {
  Outcome out;

  // Identical metrics logs for two same-seed runs.
  RunConfig a = TrendConfig("run-det-a", LossKind::kMoco, 2026, true);
  a.epochs = 4;
  RunConfig b = a;
  b.out_dir = (WorkDir() / "run-det-b").string();
  Train(a);
  Train(b);
  const std::string log_a = ReadFileText(fs::path(a.out_dir) / "metrics.log");
  const std::string log_b = ReadFileText(fs::path(b.out_dir) / "metrics.log");
  out.Expect(!log_a.empty() && log_a == log_b,
             "same-seed metrics logs differ");

  // Resume reproduces the continuation losses.
  RunConfig full = TrendConfig("run-res-full", LossKind::kMoco, 7, true);
  full.epochs = 8;
  full.keep_checkpoints = 8;
  Train(full);
  RunConfig cont = full;
  cont.out_dir = (WorkDir() / "run-res-cont").string();
  cont.resume =
      (fs::path(full.out_dir) / "ckpt_epoch_003.spkc").string();
  Train(cont);

  const std::vector<double> all =
      LogLosses(fs::path(full.out_dir) / "metrics.log");
  const std::vector<double> tail =
      LogLosses(fs::path(cont.out_dir) / "metrics.log");
  out.Expect(!all.empty() && !tail.empty() && tail.size() < all.size(),
             "resume produced an unexpected log shape");
  if (out.pass) {
    const size_t offset = all.size() - tail.size();
    double worst = 0.0;
    for (size_t i = 0; i < tail.size(); ++i)
      worst = std::max(worst, std::fabs(tail[i] - all[offset + i]));
    out.Expect(worst <= 1e-5,
               fmt::format("resumed losses deviate by {:.2e}", worst));
    if (out.pass)
      out.Note(fmt::format("resume loss deviation {:.1e}", worst));
  }
  return out;
}

}  // namespace
}  // namespace spkcon

int main() {
  using spkcon::Outcome;
  std::map<std::string, double> shared;
  struct Entry {
    int id;
    const char *name;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> criteria = {
      {1, "gradient fidelity", spkcon::Criterion1},
      {2, "loss oracles", spkcon::Criterion2},
      {3, "structural reductions", spkcon::Criterion3},
      {4, "queue/EMA state machine", spkcon::Criterion4},
      {5, "metrics oracle", spkcon::Criterion5},
      {6, "augmentation calibration", spkcon::Criterion6},
      {7, "clustering", spkcon::Criterion7},
      {8, "toy trend", [&] { return spkcon::Criterion8(&shared); }},
      {9, "semi-supervised trend", spkcon::Criterion9},
      {10, "determinism", spkcon::Criterion10},
  };

  int failures = 0;
  for (const auto &entry : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception &e) {
      outcome.Fail(fmt::format("exception: {}", e.what()));
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    fmt::print("criterion {:2d} {:<26s} {:4s} [{:7.1f}s]{}{}\n", entry.id,
               entry.name, outcome.pass ? "PASS" : "FAIL", secs,
               outcome.detail.empty() ? "" : " — ", outcome.detail);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  fmt::print("{}/{} acceptance criteria passed\n",
             static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
