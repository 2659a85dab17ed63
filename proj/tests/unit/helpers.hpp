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
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pitchdsp/audio_io.hpp"

namespace testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pitchdsp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline pitchdsp::Waveform sine(double hz, double seconds, int rate = 24000, double amp = 0.5,
                               double phase = 0.0) {
  pitchdsp::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<std::size_t>(std::lround(seconds * rate)));
  for (std::size_t n = 0; n < w.samples.size(); ++n) {
    w.samples[n] = amp * std::sin(2.0 * std::numbers::pi * hz * n / rate + phase);
  }
  return w;
}

// Plain O(N^2) DFT magnitude of bins 0..N/2, for cross-checking the FFT path.
inline std::vector<double> naive_dft_magnitude(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * i % n) / double(n));
    }
    out[k] = std::abs(acc);
  }
  return out;
}

inline std::size_t argmax(const std::vector<double>& v, std::size_t lo = 0,
                          std::size_t hi = static_cast<std::size_t>(-1)) {
  hi = std::min(hi, v.size());
  std::size_t best = lo;
  for (std::size_t i = lo; i < hi; ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace testing
