// core/src/checkpoint.cc

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

#include "spkcon/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "spkcon/common.h"

namespace spkcon {

static_assert(std::endian::native == std::endian::little,
              "checkpoints are little-endian; big-endian hosts are not "
              "supported");

namespace {

constexpr char kMagic[4] = {'S', 'P', 'K', 'C'};
constexpr uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string &path) : out_(path, std::ios::binary) {
    if (!out_) throw IngestError("cannot write checkpoint '" + path + "'");
  }
  void Bytes(const void *p, size_t n) {
    out_.write(static_cast<const char *>(p),
               static_cast<std::streamsize>(n));
  }
  template <typename T>
  void Pod(T v) {
    Bytes(&v, sizeof v);
  }
  void Str(const std::string &s) {
    Pod<uint32_t>(static_cast<uint32_t>(s.size()));
    Bytes(s.data(), s.size());
  }
  void Floats(const std::vector<float> &v) {
    Pod<uint64_t>(v.size());
    Bytes(v.data(), v.size() * sizeof(float));
  }
  void Ints(const std::vector<int> &v) {
    Pod<uint64_t>(v.size());
    Bytes(v.data(), v.size() * sizeof(int));
  }
  bool ok() const { return static_cast<bool>(out_); }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string &path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IngestError("cannot open checkpoint '" + path + "'");
  }
  void Bytes(void *p, size_t n) {
    if (!in_.read(static_cast<char *>(p), static_cast<std::streamsize>(n)))
      throw IngestError("truncated checkpoint '" + path_ + "'");
  }
  template <typename T>
  T Pod() {
    T v{};
    Bytes(&v, sizeof v);
    return v;
  }
  std::string Str() {
    const uint32_t n = Pod<uint32_t>();
    if (n > (1u << 20))
      throw IngestError("corrupt checkpoint '" + path_ + "': oversized string");
    std::string s(n, '\0');
    Bytes(s.data(), n);
    return s;
  }
  std::vector<float> Floats() {
    const uint64_t n = Pod<uint64_t>();
    if (n > (1ull << 32))
      throw IngestError("corrupt checkpoint '" + path_ + "': oversized array");
    std::vector<float> v(n);
    Bytes(v.data(), n * sizeof(float));
    return v;
  }
  std::vector<int> Ints() {
    const uint64_t n = Pod<uint64_t>();
    if (n > (1ull << 32))
      throw IngestError("corrupt checkpoint '" + path_ + "': oversized array");
    std::vector<int> v(n);
    Bytes(v.data(), n * sizeof(int));
    return v;
  }
  const std::string &path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

void WriteArrays(Writer &w, const std::vector<NamedArray> &arrays) {
  w.Pod<uint32_t>(static_cast<uint32_t>(arrays.size()));
  for (const NamedArray &a : arrays) {
    w.Str(a.name);
    w.Ints(a.shape);
    w.Floats(a.data);
  }
}

std::vector<NamedArray> ReadArrays(Reader &r) {
  const uint32_t count = r.Pod<uint32_t>();
  if (count > (1u << 20))
    throw IngestError("corrupt checkpoint '" + r.path() +
                      "': oversized array table");
  std::vector<NamedArray> arrays(count);
  for (NamedArray &a : arrays) {
    a.name = r.Str();
    a.shape = r.Ints();
    a.data = r.Floats();
  }
  return arrays;
}

}  // namespace

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  Writer w(path);
  w.Bytes(kMagic, 4);
  w.Pod<uint32_t>(kVersion);
  w.Str(ckpt.arch);
  w.Pod<uint64_t>(ckpt.seed);
  w.Pod<int64_t>(ckpt.step);
  w.Pod<int32_t>(ckpt.epoch);
  WriteArrays(w, ckpt.params);
  WriteArrays(w, ckpt.velocities);
  w.Pod<int32_t>(ckpt.queue_dim);
  w.Floats(ckpt.queue_rows);
  w.Pod<uint8_t>(ckpt.has_bank ? 1 : 0);
  if (ckpt.has_bank) {
    const PrototypeBank &b = ckpt.bank;
    w.Pod<int32_t>(b.dim);
    w.Pod<uint32_t>(static_cast<uint32_t>(b.centroids.size()));
    for (const auto &c : b.centroids) w.Floats(c);
    w.Floats(b.phi);
    w.Ints(b.assignments);
    w.Ints(b.cluster_sizes);
    w.Pod<int32_t>(b.epoch_tag);
  }
  if (!w.ok()) throw IngestError("failed writing checkpoint '" + path + "'");
}

Checkpoint LoadCheckpoint(const std::string &path) {
  Reader r(path);
  char magic[4] = {};
  r.Bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IngestError("'" + path + "' is not a checkpoint (bad magic)");
  Checkpoint ckpt;
  ckpt.version = r.Pod<uint32_t>();
  if (ckpt.version != kVersion)
    throw IngestError("checkpoint '" + path + "' has unsupported version " +
                      std::to_string(ckpt.version));
  ckpt.arch = r.Str();
  ckpt.seed = r.Pod<uint64_t>();
  ckpt.step = r.Pod<int64_t>();
  ckpt.epoch = r.Pod<int32_t>();
  ckpt.params = ReadArrays(r);
  ckpt.velocities = ReadArrays(r);
  ckpt.queue_dim = r.Pod<int32_t>();
  ckpt.queue_rows = r.Floats();
  ckpt.has_bank = r.Pod<uint8_t>() != 0;
  if (ckpt.has_bank) {
    PrototypeBank &b = ckpt.bank;
    b.dim = r.Pod<int32_t>();
    const uint32_t m = r.Pod<uint32_t>();
    if (m > (1u << 20))
      throw IngestError("corrupt checkpoint '" + path + "': oversized bank");
    b.centroids.resize(m);
    for (auto &c : b.centroids) c = r.Floats();
    b.phi = r.Floats();
    b.assignments = r.Ints();
    b.cluster_sizes = r.Ints();
    b.epoch_tag = r.Pod<int32_t>();
  }
  return ckpt;
}

}  // namespace spkcon
