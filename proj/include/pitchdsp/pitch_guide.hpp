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

#include "pitchdsp/matrix.hpp"
#include "pitchdsp/spectral.hpp"

namespace pitchdsp {

struct GuideConfig {
  int bins = 1024;
  double f_lo_hz = 20.0;
  double f_hi_hz = 2000.0;
  // Subharmonic summation: harmonic count and per-harmonic weight decay.
  int n_harmonics = 8;
  double decay = 0.86;

  double bins_per_octave() const;
};

// freq_axis[i] = f_lo * (f_hi / f_lo)^(i / (bins - 1)); endpoints exact.
std::vector<double> guide_frequency_axis(const GuideConfig& config = {});

// Per-frame prior over the log-spaced axis, each non-silent row max == 1.
struct PitchGuide {
  Matrix values;
  std::vector<double> freq_axis;
  // Rows with no spectral content; their values are all zero.
  std::vector<bool> silent;
  double frame_shift_s = 0.005;
};

// Row-stochastic distribution over the same axis as a PitchGuide.
struct PitchDistribution {
  Matrix values;
  std::vector<double> freq_axis;
};

// G'[t, f] = sum_{n=1..N} decay^(n-1) * L(t, n * f), L being the input
// linearly interpolated on the linear frequency axis of an fft_size STFT.
// Terms with n * f above Nyquist are dropped.
Matrix shs(const Matrix& fine_spec_exp, int sample_rate, int fft_size,
           const GuideConfig& config = {});

PitchGuide build_pitch_guide(const AmplitudeSpectrogram& s, const SpectralConfig& spectral = {},
                             const GuideConfig& config = {});

// Hinge loss averaged over non-silent guide frames:
// (1/T') sum_t max(1 - sum_f P[t,f] G[t,f] - m, 0).
double guide_loss(const PitchDistribution& p, const PitchGuide& g, double m = 0.5);

// Same, against the guide shifted by delta_f_bins: G[t, f - delta_f_bins],
// zero outside the axis.
double shifted_guide_loss(const PitchDistribution& p_shift, const PitchGuide& g,
                          int delta_f_bins, double m = 0.5);

// Guide-axis shift equivalent to a CQT scope shift of d_bins. Both axes are
// log-uniform, so this is d_bins scaled by the ratio of bins per octave.
int cqt_shift_to_guide_bins(int d_bins, int cqt_bins_per_octave = 24,
                            const GuideConfig& config = {});

struct GuideSample {
  double value = 0.0;
  // d value / d log2(f0); the slope of the piecewise-linear interpolant.
  double slope = 0.0;
  bool clamped = false;
};

// Linear interpolation of row t in log2 frequency. f0 outside the axis is
// clamped to the nearest endpoint and reported through `clamped`.
GuideSample guide_value_at(const PitchGuide& g, std::size_t t, double f0_hz);

}  // namespace pitchdsp
