// tools/spkcon_main.cc

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

// spkcon: contrastive speaker-embedding trainer and evaluator.
//
//   spkcon gen-toy [--out DIR] [--seed N] ...   synthesize a toy corpus
//   spkcon train --config FILE [--resume CKPT]  run the training loop
//   spkcon extract --ckpt C --manifest M --out E  embeddings -> archive
//   spkcon score --emb E --trials T [--report R] EER / minDCF of an archive
//   spkcon eval --ckpt C --manifest M --trials T [--report R]  both steps

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spkcon/common.h"
#include "spkcon/config.h"
#include "spkcon/metrics.h"
#include "spkcon/toy.h"
#include "spkcon/trainer.h"

namespace {

int RunGenToy(const std::string &out_dir, uint64_t seed,
              const spkcon::ToyConfig &toy) {
  const spkcon::ToyOutputs out =
      spkcon::GenerateToyCorpus(out_dir, seed, toy);
  fmt::print("train_manifest={}\n", out.train_manifest);
  fmt::print("eval_manifest={}\n", out.eval_manifest);
  fmt::print("trials={}\n", out.trials);
  fmt::print("aug_manifest={}\n", out.aug_manifest);
  fmt::print("config={}\n", out.config);
  return 0;
}

int RunTrain(const std::string &config_path, const std::string &resume) {
  spkcon::RunConfig cfg = spkcon::LoadRunConfig(config_path);
  if (!resume.empty()) cfg.resume = resume;
  const spkcon::TrainResult result = spkcon::Train(cfg);
  fmt::print("steps={}\n", result.steps);
  fmt::print("final_loss={:.6f}\n", result.final_loss);
  fmt::print("last_checkpoint={}\n", result.last_checkpoint);
  return 0;
}

int RunExtract(const std::string &ckpt, const std::string &manifest,
               const std::string &out) {
  const spkcon::EmbeddingMap emb = spkcon::ExtractEmbeddings(ckpt, manifest);
  spkcon::ExportEmbeddings(emb, out);
  fmt::print("embeddings={}\n", emb.size());
  fmt::print("archive={}\n", out);
  return 0;
}

int ReportAndPrint(const spkcon::EvalReport &report,
                   const std::string &report_path) {
  if (!report_path.empty()) spkcon::WriteReport(report_path, report);
  fmt::print("{}", spkcon::FormatReportTable(report));
  return 0;
}

int RunScore(const std::string &emb, const std::string &trials,
             const std::string &report_path) {
  const spkcon::EvalReport report =
      spkcon::EvaluateEmbeddings(spkcon::ImportEmbeddings(emb), trials);
  return ReportAndPrint(report, report_path);
}

int RunEval(const std::string &ckpt, const std::string &manifest,
            const std::string &trials, const std::string &report_path) {
  const spkcon::EvalReport report =
      spkcon::EvaluateCheckpoint(ckpt, manifest, trials);
  return ReportAndPrint(report, report_path);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"contrastive speaker-embedding trainer"};
  app.set_version_flag("--version", "spkcon 0.1.0");
  app.require_subcommand(1);

  // gen-toy
  std::string toy_out = "toy";
  uint64_t toy_seed = 17;
  spkcon::ToyConfig toy;
  CLI::App *gen = app.add_subcommand("gen-toy", "synthesize a toy corpus");
  gen->add_option("--out", toy_out, "output directory");
  gen->add_option("--seed", toy_seed, "corpus seed");
  gen->add_option("--speakers", toy.speakers, "total synthetic speakers");
  gen->add_option("--eval-speakers", toy.eval_speakers,
                  "held-out speakers for the trial list");
  gen->add_option("--utts-per-speaker", toy.utts_per_speaker,
                  "utterances per speaker");

  // train
  std::string config_path, resume;
  CLI::App *train = app.add_subcommand("train", "run the training loop");
  train->add_option("--config", config_path, "key=value run config")
      ->required();
  train->add_option("--resume", resume, "checkpoint to continue from");

  // extract
  std::string ckpt, manifest, emb_out;
  CLI::App *extract =
      app.add_subcommand("extract", "write an embedding archive");
  extract->add_option("--ckpt", ckpt, "checkpoint to encode with")
      ->required();
  extract->add_option("--manifest", manifest, "utterances to encode")
      ->required();
  extract->add_option("--out", emb_out, "embedding archive to write")
      ->required();

  // score
  std::string emb_in, trials, report_path;
  CLI::App *score =
      app.add_subcommand("score", "EER / minDCF of an embedding archive");
  score->add_option("--emb", emb_in, "embedding archive")->required();
  score->add_option("--trials", trials, "trial list")->required();
  score->add_option("--report", report_path, "write a key=value report");

  // eval
  std::string eval_ckpt, eval_manifest, eval_trials, eval_report;
  CLI::App *eval =
      app.add_subcommand("eval", "extract and score in one pass");
  eval->add_option("--ckpt", eval_ckpt, "checkpoint to encode with")
      ->required();
  eval->add_option("--manifest", eval_manifest, "utterances to encode")
      ->required();
  eval->add_option("--trials", eval_trials, "trial list")->required();
  eval->add_option("--report", eval_report, "write a key=value report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return RunGenToy(toy_out, toy_seed, toy);
    if (train->parsed()) return RunTrain(config_path, resume);
    if (extract->parsed()) return RunExtract(ckpt, manifest, emb_out);
    if (score->parsed()) return RunScore(emb_in, trials, report_path);
    if (eval->parsed())
      return RunEval(eval_ckpt, eval_manifest, eval_trials, eval_report);
  } catch (const spkcon::Error &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
