// core/src/wav.cc

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

#include "spkcon/wav.h"

#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "spkcon/common.h"

namespace spkcon {

namespace {

constexpr int kRequiredRate = 16000;

uint32_t ReadU32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t ReadU16(const uint8_t *p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void PutU32(std::vector<uint8_t> *out, uint32_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
  out->push_back((v >> 16) & 0xff);
  out->push_back((v >> 24) & 0xff);
}

void PutU16(std::vector<uint8_t> *out, uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

}  // namespace

Waveform LoadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(fmt::format("cannot open wav file '{}'", path));
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IngestError(fmt::format("'{}' is not a RIFF/WAVE file", path));
  }

  // Walk chunks; require a PCM fmt chunk before data.
  size_t pos = 12;
  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t *data = nullptr;
  uint32_t data_len = 0;
  while (pos + 8 <= bytes.size()) {
    const uint8_t *hdr = bytes.data() + pos;
    uint32_t chunk_len = ReadU32(hdr + 4);
    const uint8_t *body = hdr + 8;
    if (pos + 8 + chunk_len > bytes.size()) {
      throw IngestError(fmt::format("truncated chunk in '{}'", path));
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_len < 16) {
        throw IngestError(fmt::format("malformed fmt chunk in '{}'", path));
      }
      format = ReadU16(body);
      channels = ReadU16(body + 2);
      rate = ReadU32(body + 4);
      bits = ReadU16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
      break;
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data == nullptr) {
    throw IngestError(fmt::format("missing fmt/data chunk in '{}'", path));
  }
  if (format != 1) {
    throw IngestError(
        fmt::format("'{}': encoding {} is not 16-bit PCM", path, format));
  }
  if (channels != 1) {
    throw IngestError(
        fmt::format("'{}': expected mono, got {} channels", path, channels));
  }
  if (rate != kRequiredRate) {
    throw IngestError(fmt::format("'{}': sample rate {} != required {}", path,
                                  rate, kRequiredRate));
  }
  if (bits != 16) {
    throw IngestError(
        fmt::format("'{}': expected 16 bits per sample, got {}", path, bits));
  }
  if (data_len % 2 != 0) {
    throw IngestError(fmt::format("'{}': odd data chunk length", path));
  }

  Waveform w;
  w.sample_rate = kRequiredRate;
  w.samples.resize(data_len / 2);
  for (size_t i = 0; i < w.samples.size(); ++i) {
    int16_t s = static_cast<int16_t>(ReadU16(data + 2 * i));
    w.samples[i] = static_cast<float>(s) / 32768.0f;
  }
  if (w.samples.empty()) {
    throw IngestError(fmt::format("'{}': empty audio data", path));
  }
  return w;
}

void WriteWav(const std::string &path, const Waveform &w) {
  if (w.sample_rate != kRequiredRate) {
    throw IngestError(fmt::format("refusing to write sample rate {} != {}",
                                  w.sample_rate, kRequiredRate));
  }
  std::vector<uint8_t> out;
  out.reserve(44 + 2 * w.samples.size());
  const uint32_t data_len = static_cast<uint32_t>(2 * w.samples.size());
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, kRequiredRate);
  PutU32(&out, kRequiredRate * 2);  // byte rate
  PutU16(&out, 2);                  // block align
  PutU16(&out, 16);                 // bits per sample
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_len);
  for (float v : w.samples) {
    double q = std::lround(static_cast<double>(v) * 32768.0);
    if (q > 32767.0) q = 32767.0;
    if (q < -32768.0) q = -32768.0;
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IngestError(fmt::format("cannot open '{}' for writing", path));
  f.write(reinterpret_cast<const char *>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw IngestError(fmt::format("short write to '{}'", path));
}

}  // namespace spkcon
