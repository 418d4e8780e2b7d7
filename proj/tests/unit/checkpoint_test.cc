// tests/unit/checkpoint_test.cc

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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "spkcon/checkpoint.h"
#include "spkcon/common.h"
#include "spkcon/rng.h"
#include "testing/tempdir.h"

namespace spkcon {
namespace {

NamedArray MakeArray(const std::string &name, std::vector<int> shape,
                     Rng *rng) {
  NamedArray a;
  a.name = name;
  a.shape = std::move(shape);
  int64_t n = 1;
  for (int d : a.shape) n *= d;
  a.data.resize(n);
  for (float &v : a.data) v = static_cast<float>(rng->Normal());
  return a;
}

Checkpoint MakeCheckpoint(bool with_bank) {
  Rng rng(50);
  Checkpoint c;
  c.arch = "tiny";
  c.seed = 987654321012345ULL;
  c.step = 4242;
  c.epoch = 7;
  c.params.push_back(MakeArray("q.conv0.weight", {8, 15}, &rng));
  c.params.push_back(MakeArray("q.head.bias", {1, 6}, &rng));
  c.params.push_back(MakeArray("k.conv0.weight", {8, 15}, &rng));
  c.velocities.push_back(MakeArray("q.conv0.weight", {8, 15}, &rng));
  c.queue_dim = 6;
  c.queue_rows.resize(4 * 6);
  for (float &v : c.queue_rows) v = static_cast<float>(rng.Normal());
  if (with_bank) {
    c.has_bank = true;
    c.bank.dim = 6;
    c.bank.centroids = {{1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0}};
    c.bank.phi = {0.25f, 1.5f};
    c.bank.assignments = {0, 1, 1, 0, 0};
    c.bank.cluster_sizes = {3, 2};
    c.bank.epoch_tag = 5;
  }
  return c;
}

void ExpectEqual(const Checkpoint &a, const Checkpoint &b) {
  CHECK(a.version == b.version);
  CHECK(a.arch == b.arch);
  CHECK(a.seed == b.seed);
  CHECK(a.step == b.step);
  CHECK(a.epoch == b.epoch);
  REQUIRE(a.params.size() == b.params.size());
  for (size_t i = 0; i < a.params.size(); ++i) {
    CHECK(a.params[i].name == b.params[i].name);
    CHECK(a.params[i].shape == b.params[i].shape);
    CHECK(a.params[i].data == b.params[i].data);  // bit-exact
  }
  REQUIRE(a.velocities.size() == b.velocities.size());
  for (size_t i = 0; i < a.velocities.size(); ++i) {
    CHECK(a.velocities[i].name == b.velocities[i].name);
    CHECK(a.velocities[i].data == b.velocities[i].data);
  }
  CHECK(a.queue_dim == b.queue_dim);
  CHECK(a.queue_rows == b.queue_rows);
  REQUIRE(a.has_bank == b.has_bank);
  if (a.has_bank) {
    CHECK(a.bank.dim == b.bank.dim);
    CHECK(a.bank.centroids == b.bank.centroids);
    CHECK(a.bank.phi == b.bank.phi);
    CHECK(a.bank.assignments == b.bank.assignments);
    CHECK(a.bank.cluster_sizes == b.bank.cluster_sizes);
    CHECK(a.bank.epoch_tag == b.bank.epoch_tag);
  }
}

TEST_CASE("checkpoint round trip with bank") {
  testing::TempDir dir;
  const std::string path = dir.file("run.ckpt");
  Checkpoint c = MakeCheckpoint(/*with_bank=*/true);
  SaveCheckpoint(path, c);
  ExpectEqual(LoadCheckpoint(path), c);
}

TEST_CASE("checkpoint round trip without bank") {
  testing::TempDir dir;
  const std::string path = dir.file("run.ckpt");
  Checkpoint c = MakeCheckpoint(/*with_bank=*/false);
  SaveCheckpoint(path, c);
  Checkpoint back = LoadCheckpoint(path);
  ExpectEqual(back, c);
  CHECK_FALSE(back.has_bank);
  CHECK(back.bank.num_clusters() == 0);
}

TEST_CASE("checkpoint saving twice produces identical bytes") {
  testing::TempDir dir;
  Checkpoint c = MakeCheckpoint(/*with_bank=*/true);
  SaveCheckpoint(dir.file("a.ckpt"), c);
  SaveCheckpoint(dir.file("b.ckpt"), c);
  std::ifstream fa(dir.file("a.ckpt"), std::ios::binary);
  std::ifstream fb(dir.file("b.ckpt"), std::ios::binary);
  std::string ba((std::istreambuf_iterator<char>(fa)),
                 std::istreambuf_iterator<char>());
  std::string bb((std::istreambuf_iterator<char>(fb)),
                 std::istreambuf_iterator<char>());
  CHECK(ba.size() > 0);
  CHECK(ba == bb);
}

TEST_CASE("checkpoint load rejects malformed files") {
  testing::TempDir dir;

  CHECK_THROWS_WITH_AS(LoadCheckpoint(dir.file("missing.ckpt")),
                       doctest::Contains("cannot open"), IngestError);

  const std::string junk = dir.file("junk.ckpt");
  testing::WriteTextFile(junk, "JUNKxxxxxxxxxxxxxxxxxxxx");
  CHECK_THROWS_WITH_AS(LoadCheckpoint(junk), doctest::Contains("bad magic"),
                       IngestError);

  const std::string good = dir.file("good.ckpt");
  SaveCheckpoint(good, MakeCheckpoint(/*with_bank=*/true));

  // Bump the version field (bytes 4..7, little-endian u32) to 99.
  const std::string versioned = dir.file("versioned.ckpt");
  std::filesystem::copy_file(good, versioned);
  {
    std::fstream f(versioned,
                   std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(4);
    const uint32_t v = 99;
    f.write(reinterpret_cast<const char *>(&v), sizeof v);
  }
  CHECK_THROWS_WITH_AS(LoadCheckpoint(versioned),
                       doctest::Contains("unsupported version 99"),
                       IngestError);

  // Chop bytes off the tail and out of the header.
  for (uintmax_t keep : {std::filesystem::file_size(good) - 3, uintmax_t{9}}) {
    const std::string cut = dir.file("cut" + std::to_string(keep) + ".ckpt");
    std::filesystem::copy_file(good, cut);
    std::filesystem::resize_file(cut, keep);
    CHECK_THROWS_WITH_AS(LoadCheckpoint(cut), doctest::Contains("truncated"),
                         IngestError);
  }

  // A header whose string length claims to be enormous.
  const std::string oversized = dir.file("oversized.ckpt");
  {
    std::ofstream f(oversized, std::ios::binary);
    f.write("SPKC", 4);
    const uint32_t version = 1;
    f.write(reinterpret_cast<const char *>(&version), sizeof version);
    const uint32_t huge = 0xFFFFFFFFu;
    f.write(reinterpret_cast<const char *>(&huge), sizeof huge);
  }
  CHECK_THROWS_WITH_AS(LoadCheckpoint(oversized),
                       doctest::Contains("oversized string"), IngestError);
}

}  // namespace
}  // namespace spkcon
