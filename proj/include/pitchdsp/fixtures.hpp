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
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/pitch_track.hpp"

namespace pitchdsp {

struct Formant {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
  double gain = 1.0;
};

// Roughly the vowel /a/.
std::vector<Formant> default_formants();

struct VowelOptions {
  double duration_s = 1.0;
  int sample_rate = kInternalSampleRate;
  double frame_shift_s = 0.005;
  std::vector<Formant> formants = default_formants();
  // Time ranges [begin, end) in seconds that hold white noise instead of the
  // vowel, crossfaded over fade_s around each edge. Labels there are 0.
  std::vector<std::pair<double, double>> unvoiced;
  // Unvoiced noise RMS relative to the vowel's RMS.
  double unvoiced_level = 1.0;
  // Pass the unvoiced noise through the formant filter (a whispered vowel)
  // instead of leaving it white.
  bool filter_unvoiced = false;
  // Standard deviation of white noise added to the source everywhere.
  double noise_floor = 0.0;
  // Raised-cosine ramp length at both ends and at unvoiced edges.
  double fade_s = 0.01;
  std::uint64_t seed = 0;
};

struct VowelFixture {
  Waveform waveform;
  PitchLabelTrack labels;
};

// Harmonic source (every harmonic below Nyquist, equal amplitude) through a
// cascade of two-pole resonators, each peak-normalized to its gain. Starts
// and ends are faded so the resonators are not hit by a step. Labels
// hold the instantaneous F0 at t = i * frame_shift for ceil(duration /
// frame_shift) frames.
VowelFixture make_vowel(const std::function<double(double)>& f0_of_time,
                        const VowelOptions& options = {});

// F0 contour given per frame at options.frame_shift_s, interpolated linearly
// between frames and held past the last one.
VowelFixture make_vowel(const PitchTrack& f0_contour, const VowelOptions& options = {});

VowelFixture make_flat_vowel(double f0_hz, const VowelOptions& options = {});
// f0 * 2^(depth_semitones / 12 * sin(2 pi rate t)).
VowelFixture make_vibrato_vowel(double f0_hz, double depth_semitones, double rate_hz,
                                const VowelOptions& options = {});

// Writes name.wav and name.f0 ("time f0" rows) into dir.
void write_fixture(const std::filesystem::path& dir, const std::string& name,
                   const VowelFixture& fixture);

// Central-difference gradient of f at params, one coordinate at a time.
std::vector<double> finite_difference_oracle(
    const std::function<double(std::span<const double>)>& f, std::vector<double> params,
    double step);

}  // namespace pitchdsp
