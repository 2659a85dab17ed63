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

#include <vector>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/matrix.hpp"

namespace pitchdsp {

struct CqtConfig {
  double f_min = 32.70;
  int bins = 205;
  int bins_per_octave = 24;
  // Scales every bandwidth; below 1 shortens kernels for better time resolution.
  double filter_scale = 0.5;
  double frame_shift_s = 0.005;
  // Width of the window handed to pitch consumers, and how far it may slide.
  int window_bins = 176;

  int max_shift() const { return (bins - window_bins) / 2; }
  int window_start() const { return (bins - window_bins) / 2; }
};

struct CqtMatrix {
  Matrix magnitudes;  // T x bins
  int bins_per_octave = 24;
  double f_min = 32.70;
  double frame_shift_s = 0.005;
};

// Complex kernel bank evaluated directly in the time domain. Kernel j is a
// Hann-windowed complex exponential at f_min * 2^(j / bins_per_octave),
// length Q * fs / f_j with Q = filter_scale / (2^(1/bpo) - 1), normalized so a
// unit-amplitude sinusoid at the bin center reads 0.5.
class CqtAnalyzer {
 public:
  explicit CqtAnalyzer(int sample_rate = kInternalSampleRate, CqtConfig config = {});

  const CqtConfig& config() const { return config_; }
  double bin_frequency(int bin) const;
  std::size_t longest_kernel() const { return kernels_.front().cos.size(); }

  CqtMatrix analyze(const Waveform& w) const;

 private:
  struct Kernel {
    std::vector<double> cos;
    std::vector<double> sin;
  };
  int sample_rate_;
  CqtConfig config_;
  std::vector<Kernel> kernels_;
};

CqtMatrix cqt_analyze(const Waveform& w, const CqtConfig& config = {});

// Returns the window_bins-wide slice starting at window_start() + d_bins.
// A positive d_bins reads higher CQT bins, which presents the content as if
// it were pitched d_bins lower.
CqtMatrix shift_scope(const CqtMatrix& c, int d_bins, const CqtConfig& config = {});

// log(1 + C / gamma), for consumers that want encoder-style input.
Matrix log_compress(const Matrix& magnitudes, double gamma = 1e-3);

}  // namespace pitchdsp
