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
#include <stdexcept>
#include <vector>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/features.hpp"
#include "pitchdsp/pitch_guide.hpp"
#include "pitchdsp/pitch_track.hpp"
#include "pitchdsp/pseudo_spec.hpp"
#include "pitchdsp/spectral.hpp"

namespace pitchdsp {

class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LossWeights {
  double pseudo = 10.0;
  double guide = 1.0;
  double recon = 5.0;
  double tv = 0.1;
};

struct EstimatorConfig {
  int steps = 200;
  double lr_log2f0 = 0.005;
  double lr_bap_logit = 0.05;
  // Both learning rates follow a cosine decay down to this fraction.
  double lr_final_ratio = 0.01;
  LossWeights weights;
  double theta = 0.5;
  double m = 0.5;
  double eps = 1e-3;
  double alpha = 0.1;
  std::uint64_t seed = 0;
  // Starting F0 when the guide weight is zero.
  double fallback_f0_hz = 200.0;
  int median_width = 5;
  SpectralConfig spectral;
  GuideConfig guide;

  // Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct LossBreakdown {
  double total = 0.0;
  double pseudo = 0.0;
  double guide = 0.0;
  double recon = 0.0;
  double tv = 0.0;
};

struct InitialState {
  PitchTrack pitch;
  BandAperiodicity bap;
};

// Guide argmax per frame, median filtered over non-silent neighbours, with
// silent frames filled from the voiced ones (linear in log2 inside gaps,
// constant at the edges). BAP starts at 0.5 everywhere.
InitialState initialize(const AmplitudeSpectrogram& s, const PitchGuide& g, int median_width = 5);

struct EstimationResult {
  PitchTrack pitch;
  BandAperiodicity bap;
  Aperiodicity aperiodicity;
  VoicingMask voicing;
  std::vector<LossBreakdown> loss_trace;
  AmplitudeSpectrogram spectrogram;
  SpectralEnvelope envelope;
  PitchGuide guide;
  std::size_t num_samples = 0;
};

// Expects a waveform at the internal rate; see analyze_features otherwise.
EstimationResult estimate(const Waveform& w, const EstimatorConfig& config = {});

// Resamples to the internal rate if needed, then estimates.
VocoderFeatureSet analyze_features(const Waveform& w, const EstimatorConfig& config = {});
VocoderFeatureSet to_feature_set(const EstimationResult& r);

// Moving average (trailing, shrinking at the start) of the total loss.
std::vector<double> smoothed_total_loss(const std::vector<LossBreakdown>& trace, int window = 5);

// The pseudo objective as the estimator sees it for the final state, with
// noise drawn from `seed`. Useful for plotting S* next to S.
PseudoObjective final_pseudo_objective(const EstimationResult& r, const EstimatorConfig& config,
                                       std::uint64_t seed);

}  // namespace pitchdsp
