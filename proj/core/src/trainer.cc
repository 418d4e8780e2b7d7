// core/src/trainer.cc

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

#include "spkcon/trainer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "spkcon/augment.h"
#include "spkcon/checkpoint.h"
#include "spkcon/common.h"
#include "spkcon/encoder.h"
#include "spkcon/frontend.h"
#include "spkcon/losses.h"
#include "spkcon/optim.h"
#include "spkcon/prototypes.h"
#include "spkcon/rng.h"
#include "spkcon/wav.h"

namespace spkcon {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Dataset loading

struct Dataset {
  std::vector<ManifestEntry> entries;
  std::vector<Waveform> waves;
  std::vector<std::vector<uint8_t>> vad;    // clean-signal keep masks
  std::vector<FeatureMatrix> clean_feats;   // post-VAD MFCC, not normalized
  std::vector<int> labels;                  // dense speaker ids, -1 unlabeled
  int num_speakers = 0;
};

Dataset LoadDataset(const std::string &manifest_path, MfccComputer *mfcc,
                    int min_frames) {
  const FrontendConfig &fe = mfcc->config();
  Dataset ds;
  std::map<std::string, int> speaker_ids;
  for (const ManifestEntry &entry : LoadManifest(manifest_path)) {
    Waveform w;
    std::vector<uint8_t> keep;
    try {
      w = LoadWav(entry.path);
      keep = EnergyVad(w, fe);
    } catch (const Error &e) {
      LogWarn(fmt::format("skipping utterance '{}': {}", entry.utt, e.what()));
      continue;
    }
    FeatureMatrix feats = mfcc->ComputeMasked(w, keep);
    if (feats.rows < min_frames) {
      LogWarn(fmt::format(
          "skipping utterance '{}': {} post-VAD frames, encoder needs {}",
          entry.utt, feats.rows, min_frames));
      continue;
    }
    ds.entries.push_back(entry);
    ds.waves.push_back(std::move(w));
    ds.vad.push_back(std::move(keep));
    ds.clean_feats.push_back(std::move(feats));
    if (entry.labeled() && speaker_ids.find(entry.spk) == speaker_ids.end())
      speaker_ids.emplace(entry.spk, 0);
  }
  if (ds.entries.empty())
    throw ContractError("no usable utterances in manifest '" + manifest_path +
                        "'");
  // Dense ids in sorted speaker order so they are stable across runs.
  int next = 0;
  for (auto &[spk, id] : speaker_ids) id = next++;
  ds.num_speakers = next;
  ds.labels.reserve(ds.entries.size());
  for (const ManifestEntry &entry : ds.entries)
    ds.labels.push_back(entry.labeled() ? speaker_ids.at(entry.spk) : -1);
  return ds;
}

// ---------------------------------------------------------------------------
// Checkpoint <-> encoder state

void AppendParams(std::vector<NamedArray> *arrays, EncoderParams *params,
                  const std::string &prefix) {
  for (const auto &[name, t] : params->NamedTensors())
    arrays->push_back(NamedArray{prefix + name, t.shape(), t.values()});
  for (const auto &[name, vec] : params->NamedStats())
    arrays->push_back(NamedArray{
        prefix + name, {static_cast<int>(vec->size())}, *vec});
}

void LoadParamsInto(EncoderParams *params, const Checkpoint &ckpt,
                    const std::string &prefix) {
  std::map<std::string, const NamedArray *> table;
  for (const NamedArray &a : ckpt.params) table[a.name] = &a;
  auto fetch = [&](const std::string &name) -> const NamedArray & {
    const auto it = table.find(prefix + name);
    if (it == table.end())
      throw IngestError("checkpoint is missing array '" + prefix + name + "'");
    return *it->second;
  };
  for (auto &[name, t] : params->NamedTensors()) {
    const NamedArray &a = fetch(name);
    if (a.shape != t.shape())
      throw IngestError("checkpoint array '" + prefix + name +
                        "' has the wrong shape");
    t.values() = a.data;
  }
  for (auto &[name, vec] : params->NamedStats()) {
    const NamedArray &a = fetch(name);
    if (a.data.size() != vec->size())
      throw IngestError("checkpoint array '" + prefix + name +
                        "' has the wrong size");
    *vec = a.data;
  }
}

Checkpoint BuildCheckpoint(const std::string &arch, uint64_t seed,
                           int64_t step, int32_t epoch, EncoderParams *theta_q,
                           EncoderParams *theta_k, const SgdMomentum &opt,
                           const NegativeQueue &queue,
                           const PrototypeBank &bank) {
  Checkpoint ckpt;
  ckpt.arch = arch;
  ckpt.seed = seed;
  ckpt.step = step;
  ckpt.epoch = epoch;
  AppendParams(&ckpt.params, theta_q, "q.");
  AppendParams(&ckpt.params, theta_k, "k.");
  for (const auto &[name, vel] : opt.velocities())
    ckpt.velocities.push_back(
        NamedArray{name, {static_cast<int>(vel.size())}, vel});
  ckpt.queue_dim = queue.dim();
  ckpt.queue_rows = queue.Flatten();
  ckpt.has_bank = bank.ready();
  if (ckpt.has_bank) ckpt.bank = bank;
  return ckpt;
}

EncoderParams EncoderFromCheckpoint(const Checkpoint &ckpt,
                                    const std::string &prefix,
                                    bool trainable) {
  const TdnnConfig arch = TdnnConfig::Named(ckpt.arch);
  Rng dummy(0);
  EncoderParams params = EncoderParams::Init(arch, &dummy, trainable);
  LoadParamsInto(&params, ckpt, prefix);
  return params;
}

std::vector<NamedParam> TrainableParams(EncoderParams *params) {
  std::vector<NamedParam> out;
  for (auto &[name, t] : params->NamedTensors())
    out.push_back(NamedParam{name, t});
  return out;
}

// ---------------------------------------------------------------------------
// Embedding extraction

void UnitNormalize(std::vector<float> *v) {
  double sq = 0.0;
  for (float x : *v) sq += static_cast<double>(x) * x;
  const double norm = std::sqrt(sq);
  if (norm < 1e-12) return;  // leave the (degenerate) zero vector alone
  for (float &x : *v) x = static_cast<float>(x / norm);
}

// Eval-mode batch-1 pass over one full post-VAD utterance.
EmbeddingPair EncodeUtterance(const FeatureMatrix &feats,
                              EncoderParams *params) {
  FeatureMatrix normed = feats;
  MeanNormalize(&normed);
  Tensor x = Tensor::FromData({normed.rows, normed.cols},
                              std::move(normed.data));
  return EncodeBatch<float>({x}, params, /*training=*/false);
}

EmbeddingMap ExtractWithParams(EncoderParams *params,
                               const std::string &manifest_path,
                               MfccComputer *mfcc) {
  EmbeddingMap out;
  int skipped = 0;
  for (const ManifestEntry &entry : LoadManifest(manifest_path)) {
    FeatureMatrix feats;
    try {
      const Waveform w = LoadWav(entry.path);
      feats = mfcc->ComputeMasked(w, EnergyVad(w, mfcc->config()));
    } catch (const Error &e) {
      LogWarn(fmt::format("skipping utterance '{}': {}", entry.utt, e.what()));
      ++skipped;
      continue;
    }
    if (feats.rows < params->cfg.min_frames) {
      LogWarn(fmt::format(
          "skipping utterance '{}': {} post-VAD frames, encoder needs {}",
          entry.utt, feats.rows, params->cfg.min_frames));
      ++skipped;
      continue;
    }
    const EmbeddingPair enc = EncodeUtterance(feats, params);
    std::vector<float> emb = enc.embedding.values();
    UnitNormalize(&emb);
    if (!out.emplace(entry.utt, std::move(emb)).second)
      throw IngestError("manifest '" + manifest_path +
                        "' repeats utterance id '" + entry.utt + "'");
  }
  if (out.empty())
    throw EvalError("no usable utterances in manifest '" + manifest_path +
                    "'");
  if (skipped > 0)
    LogWarn(fmt::format("extracted {} embeddings, skipped {} utterances",
                        out.size(), skipped));
  return out;
}

// ---------------------------------------------------------------------------
// Batch planning

struct EpochPlan {
  std::vector<std::vector<int>> batches;  // dataset indices per step
};

// Plain plan: shuffle, take consecutive full batches, drop remainder.
EpochPlan PlanPlain(int n, int batch_size, Rng *rng) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  rng->Shuffle(&order);
  EpochPlan plan;
  for (int start = 0; start + batch_size <= n; start += batch_size)
    plan.batches.emplace_back(order.begin() + start,
                              order.begin() + start + batch_size);
  return plan;
}

// Semi plan: every batch holds round(labeled_fraction * batch_size) labeled
// samples (clamped to the available pool) and unlabeled samples for the
// rest. Labeled utterances cycle within the epoch when the pool is smaller
// than the demand; unlabeled utterances are consumed without replacement.
EpochPlan PlanSemi(const std::vector<int> &labels, int batch_size,
                   double labeled_fraction, Rng *rng) {
  std::vector<int> labeled, unlabeled;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    (labels[i] >= 0 ? labeled : unlabeled).push_back(i);
  int want_labeled =
      static_cast<int>(std::lround(labeled_fraction * batch_size));
  if (want_labeled > static_cast<int>(labeled.size())) {
    LogWarn(fmt::format(
        "semi: only {} labeled utterances for {} labeled slots per batch",
        labeled.size(), want_labeled));
    want_labeled = static_cast<int>(labeled.size());
  }
  const int want_unlabeled = batch_size - want_labeled;
  if (want_unlabeled > 0 && unlabeled.empty())
    throw ContractError("semi: no unlabeled utterances in the manifest");
  rng->Shuffle(&labeled);
  rng->Shuffle(&unlabeled);
  const int steps =
      want_unlabeled > 0
          ? static_cast<int>(unlabeled.size()) / want_unlabeled
          : static_cast<int>(labeled.size()) / std::max(1, want_labeled);
  EpochPlan plan;
  size_t lab_ptr = 0, unlab_ptr = 0;
  for (int s = 0; s < steps; ++s) {
    std::vector<int> batch;
    batch.reserve(batch_size);
    for (int i = 0; i < want_labeled; ++i)
      batch.push_back(labeled[(lab_ptr + i) % labeled.size()]);
    lab_ptr = labeled.empty() ? 0 : (lab_ptr + want_labeled) % labeled.size();
    for (int i = 0; i < want_unlabeled; ++i)
      batch.push_back(unlabeled[unlab_ptr++]);
    plan.batches.push_back(std::move(batch));
  }
  return plan;
}

int StepsPerEpoch(const RunConfig &cfg, const Dataset &ds) {
  // Dry-run the plan with a throwaway rng; batch counts do not depend on
  // the shuffle.
  Rng rng(0);
  const EpochPlan plan =
      cfg.loss == LossKind::kSemi
          ? PlanSemi(ds.labels, cfg.batch_size, cfg.labeled_fraction, &rng)
          : PlanPlain(static_cast<int>(ds.entries.size()), cfg.batch_size,
                      &rng);
  return static_cast<int>(plan.batches.size());
}

// ---------------------------------------------------------------------------
// Clustering pass

PrototypeBank BuildBank(const RunConfig &cfg, const Dataset &ds,
                        EncoderParams *theta_k, int epoch) {
  std::vector<std::vector<float>> points;
  points.reserve(ds.entries.size());
  for (size_t i = 0; i < ds.entries.size(); ++i) {
    const EmbeddingPair enc = EncodeUtterance(ds.clean_feats[i], theta_k);
    points.push_back(enc.projection.values());  // unit-norm head output
  }
  Rng rng(DeriveSeed(cfg.seed, "cluster", static_cast<uint64_t>(epoch)));
  PrototypeBank bank = SphericalKmeans(points, cfg.clusters, &rng);
  UpdateConcentrations(&bank, points);
  bank.epoch_tag = epoch;
  LogInfo(fmt::format("epoch {}: clustered {} utterances into {} prototypes",
                      epoch, points.size(), cfg.clusters));
  return bank;
}

// ---------------------------------------------------------------------------
// Checkpoint files

std::vector<fs::path> ListCheckpoints(const fs::path &dir) {
  std::vector<fs::path> found;
  if (!fs::exists(dir)) return found;
  for (const auto &e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("ckpt_epoch_", 0) == 0 && name.size() > 16 &&
        name.substr(name.size() - 5) == ".spkc")
      found.push_back(e.path());
  }
  std::sort(found.begin(), found.end());
  return found;
}

void PruneCheckpoints(const fs::path &dir, int keep) {
  std::vector<fs::path> found = ListCheckpoints(dir);
  while (static_cast<int>(found.size()) > keep) {
    fs::remove(found.front());
    found.erase(found.begin());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

TrainResult Train(const RunConfig &cfg) {
  const TdnnConfig arch = TdnnConfig::Named(cfg.arch);
  if (cfg.train_manifest.empty())
    throw ContractError("train_manifest is required");
  if (cfg.wav_aug && cfg.aug_manifest.empty())
    throw ContractError("augment.wav is on but no aug_manifest is set");
  if (cfg.chunk_min < arch.min_frames)
    throw ContractError(fmt::format(
        "chunk.min = {} is below the encoder minimum of {} frames",
        cfg.chunk_min, arch.min_frames));
  if (cfg.loss == LossKind::kProto && cfg.clusters < 2)
    throw ContractError("proto mode needs proto.clusters >= 2");

  FrontendConfig fe;
  fe.chunk_min_frames = cfg.chunk_min;
  fe.chunk_max_frames = cfg.chunk_max;
  MfccComputer mfcc(fe);
  Dataset ds = LoadDataset(cfg.train_manifest, &mfcc, arch.min_frames);
  if (static_cast<int>(ds.entries.size()) < cfg.batch_size)
    throw ContractError(fmt::format(
        "batch_size = {} exceeds the {} usable utterances", cfg.batch_size,
        ds.entries.size()));
  AugmentCorpus corpus;
  if (cfg.wav_aug) corpus = LoadAugmentCorpus(cfg.aug_manifest);
  const WavAugConfig wav_cfg;
  const SpecAugConfig spec_cfg;

  const bool uses_keys = cfg.loss != LossKind::kSimclr;
  uint64_t seed = cfg.seed;
  Rng init_rng(DeriveSeed(seed, "init"));
  EncoderParams theta_q = EncoderParams::Init(arch, &init_rng, true);
  EncoderParams theta_k = theta_q.Clone(/*trainable=*/false);
  SgdMomentum opt(static_cast<float>(cfg.momentum));
  NegativeQueue queue(cfg.queue_size);
  PrototypeBank bank;
  int64_t step = 0;
  int epoch_start = 0;

  if (!cfg.resume.empty()) {
    const Checkpoint ckpt = LoadCheckpoint(cfg.resume);
    if (ckpt.arch != cfg.arch)
      throw ContractError(fmt::format(
          "checkpoint arch '{}' does not match configured arch '{}'",
          ckpt.arch, cfg.arch));
    if (ckpt.seed != cfg.seed) {
      LogWarn(fmt::format(
          "resuming with checkpoint seed {} (config said {})", ckpt.seed,
          cfg.seed));
      seed = ckpt.seed;
    }
    LoadParamsInto(&theta_q, ckpt, "q.");
    LoadParamsInto(&theta_k, ckpt, "k.");
    for (const NamedArray &v : ckpt.velocities)
      opt.velocities()[v.name] = v.data;
    queue.Restore(ckpt.queue_dim, ckpt.queue_rows);
    if (ckpt.has_bank) bank = ckpt.bank;
    step = ckpt.step;
    epoch_start = ckpt.epoch;
    LogInfo(fmt::format("resumed from '{}' at epoch {}, step {}", cfg.resume,
                        epoch_start, step));
    if (epoch_start >= cfg.epochs)
      LogWarn("checkpoint already covers every configured epoch");
  }

  const int steps_per_epoch = StepsPerEpoch(cfg, ds);
  if (steps_per_epoch < 1)
    throw ContractError("dataset yields no full batches; reduce batch_size");
  const int64_t total_steps =
      static_cast<int64_t>(steps_per_epoch) * cfg.epochs;

  fs::create_directories(cfg.out_dir);
  std::ofstream log(fs::path(cfg.out_dir) / "metrics.log", std::ios::app);
  if (!log)
    throw ContractError("cannot open metrics log under '" + cfg.out_dir + "'");

  TrainResult result;
  bool announced_proto = false;
  for (int epoch = epoch_start; epoch < cfg.epochs; ++epoch) {
    const bool proto_phase =
        cfg.loss == LossKind::kProto && epoch >= cfg.warmup_epochs;
    if (proto_phase && !announced_proto) {
      LogInfo(fmt::format(
          "epoch {}: switching from InfoNCE warm-up to the prototype "
          "objective",
          epoch));
      announced_proto = true;
    }
    if (proto_phase &&
        (!bank.ready() || bank.epoch_tag < 0 ||
         (epoch - cfg.warmup_epochs) % cfg.cluster_every == 0))
      bank = BuildBank(cfg, ds, &theta_k, epoch);

    Rng order_rng(DeriveSeed(seed, "order", static_cast<uint64_t>(epoch)));
    const EpochPlan plan =
        cfg.loss == LossKind::kSemi
            ? PlanSemi(ds.labels, cfg.batch_size, cfg.labeled_fraction,
                       &order_rng)
            : PlanPlain(static_cast<int>(ds.entries.size()), cfg.batch_size,
                        &order_rng);

    for (size_t s = 0; s < plan.batches.size(); ++s) {
      std::vector<Tensor> va, vb;
      std::vector<int> batch_labels, batch_assign;
      for (int uidx : plan.batches[s]) {
        std::optional<FeatureMatrix> views[2];
        for (int view = 0; view < 2; ++view) {
          Waveform w = ds.waves[uidx];
          if (cfg.wav_aug) {
            Rng rng(DeriveSeed(seed, "wav", static_cast<uint64_t>(epoch),
                               static_cast<uint64_t>(uidx),
                               static_cast<uint64_t>(view)));
            w = WavAugView(w, corpus, wav_cfg, &rng);
          }
          FeatureMatrix feats = mfcc.ComputeMasked(w, ds.vad[uidx]);
          Rng chunk_rng(DeriveSeed(seed, "chunk", static_cast<uint64_t>(epoch),
                                   static_cast<uint64_t>(uidx),
                                   static_cast<uint64_t>(view)));
          views[view] = SampleChunk(feats, fe, &chunk_rng);
          if (!views[view]) break;
          if (cfg.spec_aug) {
            Rng sa_rng(DeriveSeed(seed, "spec", static_cast<uint64_t>(epoch),
                                  static_cast<uint64_t>(uidx),
                                  static_cast<uint64_t>(view)));
            views[view] = SpecAug(*views[view], spec_cfg, &sa_rng);
          }
        }
        if (!views[0] || !views[1]) {
          LogWarn(fmt::format("step {}: utterance '{}' too short to chunk",
                              step, ds.entries[uidx].utt));
          continue;
        }
        for (int view = 0; view < 2; ++view) {
          FeatureMatrix &m = *views[view];
          Tensor t = Tensor::FromData({m.rows, m.cols}, std::move(m.data));
          (view == 0 ? va : vb).push_back(std::move(t));
        }
        batch_labels.push_back(ds.labels[uidx]);
        if (proto_phase) batch_assign.push_back(bank.assignments[uidx]);
      }
      if (va.size() < 2) {
        LogWarn(fmt::format("step {}: batch shrank below 2, skipping", step));
        continue;
      }

      Tensor loss;
      float part_sup = 0.0f, part_moco = 0.0f, part_proto = 0.0f;
      std::string phase;
      Tensor key_proj;
      if (cfg.loss == LossKind::kSimclr) {
        phase = "simclr";
        // One joint batch: all 2N chunks share the encoder pass, then the
        // two views are split back apart.
        std::vector<Tensor> both = va;
        both.insert(both.end(), vb.begin(), vb.end());
        const EmbeddingPair enc = EncodeBatch(both, &theta_q, true);
        const int n = static_cast<int>(va.size());
        std::vector<int> ia(n), ib(n);
        for (int i = 0; i < n; ++i) {
          ia[i] = i;
          ib[i] = n + i;
        }
        loss = SimclrLoss(TakeRows(enc.projection, ia),
                          TakeRows(enc.projection, ib),
                          static_cast<float>(cfg.tau));
      } else {
        const EmbeddingPair q_enc = EncodeBatch(va, &theta_q, true);
        // Key pass: eval-mode batch norm, no gradients recorded.
        const EmbeddingPair k_enc = EncodeBatch(vb, &theta_k, false);
        key_proj = k_enc.projection.Detach();
        const Tensor snapshot = queue.Snapshot();
        const float tau = static_cast<float>(cfg.tau);
        Tensor moco = MocoLoss(q_enc.projection, key_proj, snapshot, tau);
        part_moco = moco.item();
        if (cfg.loss == LossKind::kMoco ||
            (cfg.loss == LossKind::kProto && !proto_phase)) {
          phase = "moco";
          loss = moco;
        } else if (cfg.loss == LossKind::kProto) {
          phase = "proto";
          Rng proto_rng(DeriveSeed(seed, "proto",
                                   static_cast<uint64_t>(epoch),
                                   static_cast<uint64_t>(s)));
          Tensor proto =
              ProtonceMean(q_enc.projection, bank, batch_assign,
                           cfg.proto_negatives, &proto_rng);
          part_proto = proto.item();
          loss = Add(moco, Scale(proto, static_cast<float>(cfg.alpha)));
        } else {  // semi
          phase = "semi";
          std::vector<int> lab_idx, lab_vals;
          for (size_t i = 0; i < batch_labels.size(); ++i)
            if (batch_labels[i] >= 0) {
              lab_idx.push_back(static_cast<int>(i));
              lab_vals.push_back(batch_labels[i]);
            }
          const float lambda = static_cast<float>(cfg.lambda);
          if (lab_idx.empty()) {
            LogWarn(fmt::format(
                "step {}: no labeled samples in batch, unsupervised only",
                step));
            loss = Scale(moco, lambda);
          } else {
            Tensor sup = SupconLoss(TakeRows(q_enc.projection, lab_idx),
                                    TakeRows(key_proj, lab_idx), lab_vals,
                                    tau);
            part_sup = sup.item();
            loss = Add(sup, Scale(moco, lambda));
          }
        }
      }

      const float loss_value = loss.item();
      if (!std::isfinite(loss_value))
        throw TrainError(fmt::format(
            "loss is not finite at step {}; last epoch checkpoint retained",
            step));
      theta_q.ZeroGrads();
      Backward(loss);
      const float lr = CosineLr(step, total_steps,
                                static_cast<float>(cfg.lr_start),
                                static_cast<float>(cfg.lr_end));
      std::vector<NamedParam> params = TrainableParams(&theta_q);
      opt.Step(params, lr);
      if (uses_keys) {
        EmaUpdate(&theta_k, theta_q,
                  static_cast<float>(cfg.ema_momentum));
        queue.PushRows(key_proj);
      }
      ++step;
      result.final_loss = loss_value;
      log << fmt::format(
          "step={} epoch={} phase={} loss={:.6f} lr={:.6f} queue={} "
          "sup={:.6f} moco={:.6f} proto={:.6f}\n",
          step, epoch, phase, loss_value, lr, queue.size(), part_sup,
          part_moco, part_proto);
      log.flush();
    }

    const fs::path ckpt_path =
        fs::path(cfg.out_dir) / fmt::format("ckpt_epoch_{:03d}.spkc", epoch);
    SaveCheckpoint(ckpt_path.string(),
                   BuildCheckpoint(cfg.arch, seed, step, epoch + 1, &theta_q,
                                   &theta_k, opt, queue, bank));
    PruneCheckpoints(cfg.out_dir, cfg.keep_checkpoints);
    result.last_checkpoint = ckpt_path.string();
  }
  result.steps = step;
  return result;
}

void SaveInitCheckpoint(const std::string &path, const std::string &arch_name,
                        uint64_t seed) {
  const TdnnConfig arch = TdnnConfig::Named(arch_name);
  // Same derivation as Train(), so the untrained baseline matches the
  // initialization a training run with this seed starts from.
  Rng init_rng(DeriveSeed(seed, "init"));
  EncoderParams theta_q = EncoderParams::Init(arch, &init_rng, true);
  EncoderParams theta_k = theta_q.Clone(false);
  SgdMomentum opt;
  NegativeQueue queue(1);
  PrototypeBank bank;
  SaveCheckpoint(path, BuildCheckpoint(arch_name, seed, 0, 0, &theta_q,
                                       &theta_k, opt, queue, bank));
}

EmbeddingMap ExtractEmbeddings(const std::string &ckpt_path,
                               const std::string &manifest_path) {
  const Checkpoint ckpt = LoadCheckpoint(ckpt_path);
  EncoderParams params = EncoderFromCheckpoint(ckpt, "q.", false);
  FrontendConfig fe;
  MfccComputer mfcc(fe);
  return ExtractWithParams(&params, manifest_path, &mfcc);
}

EvalReport EvaluateEmbeddings(const EmbeddingMap &embeddings,
                              const std::string &trials_path) {
  const std::vector<Trial> trials = LoadTrials(trials_path);
  const ScoredTrials scored = ScoreTrials(trials, embeddings);
  const MetricResult eer = Eer(scored);
  const MetricResult dcf = MinDcf(scored);
  EvalReport report;
  report.eer = eer.value;
  report.eer_threshold = eer.threshold;
  report.min_dcf = dcf.value;
  report.dcf_threshold = dcf.threshold;
  report.num_trials = static_cast<int>(trials.size());
  return report;
}

EvalReport EvaluateCheckpoint(const std::string &ckpt_path,
                              const std::string &manifest_path,
                              const std::string &trials_path) {
  return EvaluateEmbeddings(ExtractEmbeddings(ckpt_path, manifest_path),
                            trials_path);
}

std::string FormatReport(const EvalReport &r) {
  return fmt::format(
      "eer={:.17g}\nmin_dcf={:.17g}\neer_threshold={:.17g}\n"
      "dcf_threshold={:.17g}\nnum_trials={}\n",
      r.eer, r.min_dcf, r.eer_threshold, r.dcf_threshold, r.num_trials);
}

EvalReport ParseReport(const std::string &text) {
  EvalReport r;
  bool seen[5] = {false, false, false, false, false};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ContractError(fmt::format(
          "report line {}: expected key=value, got '{}'", line_no, line));
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "eer") {
        r.eer = std::stod(value);
        seen[0] = true;
      } else if (key == "min_dcf") {
        r.min_dcf = std::stod(value);
        seen[1] = true;
      } else if (key == "eer_threshold") {
        r.eer_threshold = std::stod(value);
        seen[2] = true;
      } else if (key == "dcf_threshold") {
        r.dcf_threshold = std::stod(value);
        seen[3] = true;
      } else if (key == "num_trials") {
        r.num_trials = std::stoi(value);
        seen[4] = true;
      } else {
        throw ContractError(fmt::format(
            "report line {}: unknown key '{}'", line_no, key));
      }
    } catch (const std::invalid_argument &) {
      throw ContractError(fmt::format(
          "report line {}: bad value '{}' for '{}'", line_no, value, key));
    }
  }
  for (bool b : seen)
    if (!b) throw ContractError("report is missing required keys");
  return r;
}

void WriteReport(const std::string &path, const EvalReport &report) {
  std::ofstream out(path);
  if (!out) throw EvalError("cannot write report '" + path + "'");
  out << FormatReport(report);
  if (!out) throw EvalError("failed writing report '" + path + "'");
}

EvalReport LoadReport(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw EvalError("cannot open report '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseReport(buf.str());
}

std::string FormatReportTable(const EvalReport &r) {
  std::string out;
  out += fmt::format("  trials        : {}\n", r.num_trials);
  out += fmt::format("  EER           : {:.2f} %  (threshold {:.4f})\n",
                     100.0 * r.eer, r.eer_threshold);
  out += fmt::format("  minDCF (0.01) : {:.4f}  (threshold {:.4f})\n",
                     r.min_dcf, r.dcf_threshold);
  return out;
}

}  // namespace spkcon
