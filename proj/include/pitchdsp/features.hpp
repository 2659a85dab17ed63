// Copyright 2026 The pitchdsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "pitchdsp/matrix.hpp"
#include "pitchdsp/pitch_track.hpp"
#include "pitchdsp/spectral.hpp"

namespace pitchdsp {

inline constexpr double kBapMin = 1e-4;
inline constexpr double kBapMax = 1.0 - 1e-4;

// T x b band aperiodicity in [kBapMin, kBapMax].
struct BandAperiodicity {
  Matrix values;

  void clamp();
};

// T x (K+1) aperiodicity, interpolated from a BandAperiodicity.
struct Aperiodicity {
  Matrix values;
};

struct VoicingMask {
  std::vector<std::uint8_t> flags;  // 1 = voiced
  std::vector<double> soft_ratio;   // v' = M_p / (M_p + M_ap)
  // Frames where M_p + M_ap == 0; reported unvoiced with v' = 0.
  std::vector<std::uint8_t> degenerate;

  std::size_t size() const { return flags.size(); }
  bool voiced(std::size_t t) const { return flags[t] != 0; }
  std::size_t voiced_count() const;
};

struct VocoderFeatureSet {
  PitchTrack pitch;
  SpectralEnvelope envelope;
  BandAperiodicity bap;
  Aperiodicity aperiodicity;
  VoicingMask voicing;
  double frame_shift_s = 0.005;
  int sample_rate = kInternalSampleRate;
  int fft_size = 2048;
  std::size_t num_samples = 0;
};

}  // namespace pitchdsp
