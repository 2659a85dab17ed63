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
#include <stdexcept>
#include <string>
#include <vector>

namespace pitchdsp {

// Every analysis stage runs at this rate; inputs are resampled on entry.
inline constexpr int kInternalSampleRate = 24000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kInternalSampleRate;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Ground-truth F0 annotation. f0_hz == 0 marks an unvoiced frame.
struct PitchLabelTrack {
  std::vector<double> times;
  std::vector<double> f0_hz;

  std::size_t size() const { return times.size(); }
  bool voiced(std::size_t i) const { return f0_hz[i] > 0.0; }
};

class AudioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ChannelMix { kAverage, kLeft, kRight };
enum class SampleFormat { kPcm16, kFloat32 };
enum class LabelUnits { kHz, kSemitone };

void validate(const Waveform& w);

// Reads RIFF/WAVE with 16-bit PCM or 32-bit float samples, mono or stereo.
Waveform load_wav(const std::filesystem::path& path, ChannelMix mix = ChannelMix::kAverage);
void save_wav(const std::filesystem::path& path, const Waveform& w,
              SampleFormat format = SampleFormat::kFloat32);

// Band-limited (Kaiser-windowed sinc) resampling to an arbitrary rate.
Waveform resample(const Waveform& w, int target_rate);
// Resampling where the input is reinterpreted as sampled at source_rate
// (may be fractional). Used for rate-change pitch shifting.
Waveform resample_from(const std::vector<double>& samples, double source_rate,
                       int target_rate);

// Loads "time f0" rows, or one value per line spaced by frame_shift_s.
// Blank lines and lines starting with '#' are skipped.
PitchLabelTrack load_pitch_labels(const std::filesystem::path& path, double frame_shift_s,
                                  LabelUnits units = LabelUnits::kHz);
PitchLabelTrack parse_pitch_labels(const std::string& text, double frame_shift_s,
                                   LabelUnits units = LabelUnits::kHz);
void save_pitch_labels(const std::filesystem::path& path, const PitchLabelTrack& labels);

double semitone_to_hz(double semitone);

}  // namespace pitchdsp
