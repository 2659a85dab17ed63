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

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/features.hpp"
#include "pitchdsp/pitch_track.hpp"

namespace pitchdsp {

// x^2 / 2 inside [-delta, delta], linear outside.
double huber(double x, double delta = 1.0);

// (1/T) sum_t h(|log2 p_t - log2 p_shift_t + d / 12|). d is in semitones.
double consistency_loss(const PitchTrack& p, const PitchTrack& p_shift, double d_semitones,
                        double delta = 1.0);

double aug_pitch_loss(const PitchTrack& p, const PitchTrack& p_aug, double delta = 1.0);

// Mean over elements of |log A_aug - log A|.
double aug_aperiodicity_loss(const Aperiodicity& a_aug, const Aperiodicity& a);

struct AugmentedWaveform {
  Waveform waveform;
  double snr_db = 0.0;
  double gain_db = 0.0;
};

// Adds white noise at exactly snr_db relative to the input power, then applies
// gain_db to the mixture. A silent input gets no noise.
AugmentedWaveform mix_noise(const Waveform& w, double snr_db, double gain_db, std::uint64_t seed);

// SNR drawn uniformly in [max_snr_db, 30] dB and gain uniformly in
// [-gain_range_db, gain_range_db].
AugmentedWaveform augment_waveform(const Waveform& w, double max_snr_db = -6.0,
                                   double gain_range_db = 6.0, std::uint64_t seed = 0);

}  // namespace pitchdsp
