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

#include "pitchdsp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace pitchdsp {

AlignedTracks align_tracks(const PitchTrack& est, const VoicingMask& voicing,
                           double frame_shift_s, const PitchLabelTrack& ref) {
  if (voicing.size() != est.size()) {
    throw std::invalid_argument("align_tracks: voicing and pitch lengths differ");
  }
  if (!(frame_shift_s > 0.0)) throw std::invalid_argument("align_tracks: bad frame shift");
  AlignedTracks a;
  const double tol = 0.5 * frame_shift_s + 1e-9;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double pos = std::round(ref.times[i] / frame_shift_s);
    if (pos < 0.0 || pos >= static_cast<double>(est.size()) ||
        std::abs(pos * frame_shift_s - ref.times[i]) > tol) {
      ++a.unmatched;
      continue;
    }
    const auto j = static_cast<std::size_t>(pos);
    a.est_hz.push_back(est.hz(j));
    a.est_voiced.push_back(voicing.voiced(j));
    a.ref_hz.push_back(ref.f0_hz[i]);
  }
  if (a.size() == 0) throw AlignmentError("no reference frame lines up with the estimate");
  return a;
}

AlignedTracks align_label_tracks(const PitchLabelTrack& est, const PitchLabelTrack& ref,
                                 double frame_shift_s) {
  if (!(frame_shift_s > 0.0)) throw std::invalid_argument("align_label_tracks: bad frame shift");
  if (est.size() == 0) throw AlignmentError("estimate track is empty");
  AlignedTracks a;
  const double tol = 0.5 * frame_shift_s + 1e-9;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double t = ref.times[i];
    const auto it = std::lower_bound(est.times.begin(), est.times.end(), t);
    std::size_t j = static_cast<std::size_t>(it - est.times.begin());
    if (j == est.size() || (j > 0 && t - est.times[j - 1] <= est.times[j] - t)) --j;
    if (std::abs(est.times[j] - t) > tol) {
      ++a.unmatched;
      continue;
    }
    a.est_hz.push_back(est.f0_hz[j]);
    a.est_voiced.push_back(est.voiced(j));
    a.ref_hz.push_back(ref.f0_hz[i]);
  }
  if (a.size() == 0) throw AlignmentError("no reference frame lines up with the estimate");
  return a;
}

double chroma_error_cents(double est_hz, double ref_hz) {
  const double octaves = std::log2(est_hz / ref_hz);
  return 1200.0 * std::abs(octaves - std::round(octaves));
}

namespace {

template <typename F>
std::optional<double> voiced_fraction(const AlignedTracks& a, F correct) {
  std::size_t voiced = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.ref_hz[i] > 0.0)) continue;
    ++voiced;
    if (a.est_hz[i] > 0.0 && correct(a.est_hz[i], a.ref_hz[i])) ++hits;
  }
  if (voiced == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(voiced);
}

}  // namespace

std::optional<double> raw_pitch_accuracy(const AlignedTracks& a, double cents_tol) {
  return voiced_fraction(a, [cents_tol](double e, double r) {
    return std::abs(1200.0 * std::log2(e / r)) <= cents_tol;
  });
}

std::optional<double> raw_chroma_accuracy(const AlignedTracks& a, double cents_tol) {
  return voiced_fraction(
      a, [cents_tol](double e, double r) { return chroma_error_cents(e, r) <= cents_tol; });
}

std::optional<double> log_f0_rmse(const AlignedTracks& a, LogBase base) {
  std::size_t voiced = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.ref_hz[i] > 0.0) || !(a.est_hz[i] > 0.0)) continue;
    ++voiced;
    const double d = base == LogBase::kNatural ? std::log(a.est_hz[i]) - std::log(a.ref_hz[i])
                                               : std::log2(a.est_hz[i]) - std::log2(a.ref_hz[i]);
    total += d * d;
  }
  if (voiced == 0) return std::nullopt;
  return std::sqrt(total / static_cast<double>(voiced));
}

std::optional<double> vuv_error_rate(const AlignedTracks& a) {
  if (a.size() == 0) return std::nullopt;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.est_voiced[i] != (a.ref_hz[i] > 0.0)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(a.size());
}

MetricReport evaluate(const AlignedTracks& a, LogBase base) {
  MetricReport r;
  r.rpa50 = raw_pitch_accuracy(a, 50.0);
  r.rpa100 = raw_pitch_accuracy(a, 100.0);
  r.rca50 = raw_chroma_accuracy(a, 50.0);
  r.log_f0_rmse = log_f0_rmse(a, base);
  r.vuv_error_rate = vuv_error_rate(a);
  r.frames = a.size();
  for (double f : a.ref_hz) r.voiced_frames += f > 0.0 ? 1 : 0;
  r.unmatched = a.unmatched;
  return r;
}

namespace {

std::string fmt(const std::optional<double>& v) {
  if (!v) return "nan";
  std::ostringstream os;
  os.precision(6);
  os << *v;
  return os.str();
}

nlohmann::json to_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_key_value(const MetricReport& r) {
  std::ostringstream os;
  os << "rpa50=" << fmt(r.rpa50) << "\n"
     << "rpa100=" << fmt(r.rpa100) << "\n"
     << "rca50=" << fmt(r.rca50) << "\n"
     << "log_f0_rmse=" << fmt(r.log_f0_rmse) << "\n"
     << "vuv_error_rate=" << fmt(r.vuv_error_rate) << "\n"
     << "frames=" << r.frames << "\n"
     << "voiced_frames=" << r.voiced_frames << "\n"
     << "unmatched=" << r.unmatched << "\n";
  return os.str();
}

std::string format_json(const MetricReport& r) {
  nlohmann::json j;
  j["rpa50"] = to_json(r.rpa50);
  j["rpa100"] = to_json(r.rpa100);
  j["rca50"] = to_json(r.rca50);
  j["log_f0_rmse"] = to_json(r.log_f0_rmse);
  j["vuv_error_rate"] = to_json(r.vuv_error_rate);
  j["frames"] = r.frames;
  j["voiced_frames"] = r.voiced_frames;
  j["unmatched"] = r.unmatched;
  return j.dump(2) + "\n";
}

}  // namespace pitchdsp
