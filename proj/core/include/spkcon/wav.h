// core/include/spkcon/wav.h

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

#ifndef SPKCON_WAV_H_
#define SPKCON_WAV_H_

#include <string>
#include <vector>

namespace spkcon {

struct Waveform {
  std::vector<float> samples;  // nominally in [-1, 1]
  int sample_rate = 16000;
};

// Reads a mono 16-bit PCM WAV at 16 kHz; samples are scaled by 1/32768.
// Any other rate/channel-count/encoding raises IngestError naming the
// offending property.
Waveform LoadWav(const std::string &path);

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] and quantized with
// round(x * 32768) clipped to the int16 range, so LoadWav(WriteWav(w)) is an
// identity for in-range quantized values.
void WriteWav(const std::string &path, const Waveform &w);

}  // namespace spkcon

#endif  // SPKCON_WAV_H_
