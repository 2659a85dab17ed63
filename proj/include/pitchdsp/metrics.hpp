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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/features.hpp"
#include "pitchdsp/pitch_track.hpp"

namespace pitchdsp {

class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimate frames matched to reference frames. Reference frame i pairs with
// the estimate frame nearest in time if it lies within half a hop; reference
// frames without a partner are dropped and counted.
struct AlignedTracks {
  std::vector<double> est_hz;
  std::vector<bool> est_voiced;
  std::vector<double> ref_hz;  // 0 = unvoiced
  std::size_t unmatched = 0;

  std::size_t size() const { return ref_hz.size(); }
};

AlignedTracks align_tracks(const PitchTrack& est, const VoicingMask& voicing,
                           double frame_shift_s, const PitchLabelTrack& ref);

// Same rule when the estimate is itself a label track (f0 == 0 = unvoiced);
// tolerance is half of frame_shift_s.
AlignedTracks align_label_tracks(const PitchLabelTrack& est, const PitchLabelTrack& ref,
                                 double frame_shift_s);

enum class LogBase { kNatural, kTwo };

// Pitch metrics look only at reference-voiced frames and use the estimated
// F0 whatever its voicing flag. They are empty when the reference has no
// voiced frames.
std::optional<double> raw_pitch_accuracy(const AlignedTracks& a, double cents_tol = 50.0);
std::optional<double> raw_chroma_accuracy(const AlignedTracks& a, double cents_tol = 50.0);
// Skips frames whose estimate is not positive (an external track may mark
// unvoiced frames with 0).
std::optional<double> log_f0_rmse(const AlignedTracks& a, LogBase base = LogBase::kNatural);
std::optional<double> vuv_error_rate(const AlignedTracks& a);

// Distance in cents to the nearest octave of the reference, in [0, 600].
double chroma_error_cents(double est_hz, double ref_hz);

struct MetricReport {
  std::optional<double> rpa50;
  std::optional<double> rpa100;
  std::optional<double> rca50;
  std::optional<double> log_f0_rmse;
  std::optional<double> vuv_error_rate;
  std::size_t frames = 0;
  std::size_t voiced_frames = 0;
  std::size_t unmatched = 0;
};

MetricReport evaluate(const AlignedTracks& a, LogBase base = LogBase::kNatural);

// "key=value" lines; undefined metrics print as "nan".
std::string format_key_value(const MetricReport& r);
std::string format_json(const MetricReport& r);

}  // namespace pitchdsp
