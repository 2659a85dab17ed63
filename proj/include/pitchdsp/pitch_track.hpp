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

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace pitchdsp {

inline constexpr double kMinF0Hz = 20.0;
inline constexpr double kMaxF0Hz = 2000.0;

// Per-frame F0 with a parallel log2 view. Both views are updated together.
class PitchTrack {
 public:
  PitchTrack() = default;
  explicit PitchTrack(std::size_t frames, double f0_hz = 100.0)
      : hz_(frames, f0_hz), log2_(frames, std::log2(f0_hz)) {}

  static PitchTrack from_hz(std::span<const double> hz) {
    PitchTrack p;
    p.hz_.assign(hz.begin(), hz.end());
    p.log2_.resize(hz.size());
    for (std::size_t i = 0; i < hz.size(); ++i) {
      if (!(hz[i] > 0.0)) throw std::invalid_argument("PitchTrack: F0 must be positive");
      p.log2_[i] = std::log2(hz[i]);
    }
    return p;
  }

  static PitchTrack from_log2(std::span<const double> log2_hz) {
    PitchTrack p;
    p.log2_.assign(log2_hz.begin(), log2_hz.end());
    p.hz_.resize(log2_hz.size());
    for (std::size_t i = 0; i < log2_hz.size(); ++i) p.hz_[i] = std::exp2(log2_hz[i]);
    return p;
  }

  std::size_t size() const { return hz_.size(); }
  double hz(std::size_t t) const { return hz_[t]; }
  double log2_hz(std::size_t t) const { return log2_[t]; }
  const std::vector<double>& f0_hz() const { return hz_; }
  const std::vector<double>& log2_f0() const { return log2_; }

  void set_hz(std::size_t t, double hz) {
    hz_[t] = hz;
    log2_[t] = std::log2(hz);
  }
  void set_log2(std::size_t t, double v) {
    log2_[t] = v;
    hz_[t] = std::exp2(v);
  }

  // Restricts every frame to [lo, hi] Hz.
  void clamp(double lo = kMinF0Hz, double hi = kMaxF0Hz) {
    for (std::size_t t = 0; t < hz_.size(); ++t) {
      if (hz_[t] < lo) set_hz(t, lo);
      if (hz_[t] > hi) set_hz(t, hi);
    }
  }

  bool operator==(const PitchTrack& other) const = default;

 private:
  std::vector<double> hz_;
  std::vector<double> log2_;
};

}  // namespace pitchdsp
