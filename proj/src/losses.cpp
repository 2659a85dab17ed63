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

#include "pitchdsp/losses.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pitchdsp {

namespace {

constexpr double kMaxAugmentSnrDb = 30.0;

}  // namespace

double huber(double x, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be positive");
  const double a = std::abs(x);
  return a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
}

double consistency_loss(const PitchTrack& p, const PitchTrack& p_shift, double d_semitones,
                        double delta) {
  if (p.size() != p_shift.size()) {
    throw std::invalid_argument("consistency_loss: track lengths differ");
  }
  if (p.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    total += huber(std::abs(p.log2_hz(t) - p_shift.log2_hz(t) + d_semitones / 12.0), delta);
  }
  return total / static_cast<double>(p.size());
}

double aug_pitch_loss(const PitchTrack& p, const PitchTrack& p_aug, double delta) {
  return consistency_loss(p, p_aug, 0.0, delta);
}

double aug_aperiodicity_loss(const Aperiodicity& a_aug, const Aperiodicity& a) {
  require_same_shape(a_aug.values, a.values, "aug_aperiodicity_loss");
  if (a.values.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.values.data().size(); ++i) {
    total += std::abs(std::log(a_aug.values.data()[i]) - std::log(a.values.data()[i]));
  }
  return total / static_cast<double>(a.values.data().size());
}

AugmentedWaveform mix_noise(const Waveform& w, double snr_db, double gain_db, std::uint64_t seed) {
  AugmentedWaveform out;
  out.snr_db = snr_db;
  out.gain_db = gain_db;
  out.waveform.sample_rate = w.sample_rate;
  out.waveform.samples = w.samples;
  const std::size_t n = w.samples.size();

  double signal_power = 0.0;
  for (double v : w.samples) signal_power += v * v;
  if (n > 0) signal_power /= static_cast<double>(n);

  if (signal_power > 0.0) {
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(n);
    double noise_power = 0.0;
    for (double& v : noise) {
      v = normal(engine);
      noise_power += v * v;
    }
    noise_power /= static_cast<double>(n);
    const double scale = std::sqrt(signal_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
    for (std::size_t i = 0; i < n; ++i) out.waveform.samples[i] += scale * noise[i];
  }
  const double gain = std::pow(10.0, gain_db / 20.0);
  for (double& v : out.waveform.samples) v *= gain;
  return out;
}

AugmentedWaveform augment_waveform(const Waveform& w, double max_snr_db, double gain_range_db,
                                   std::uint64_t seed) {
  if (max_snr_db > kMaxAugmentSnrDb) {
    throw std::invalid_argument("augment_waveform: max_snr_db above the 30 dB ceiling");
  }
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> snr(max_snr_db, kMaxAugmentSnrDb);
  std::uniform_real_distribution<double> gain(-gain_range_db, gain_range_db);
  const double snr_db = snr(engine);
  const double gain_db = gain_range_db > 0.0 ? gain(engine) : 0.0;
  return mix_noise(w, snr_db, gain_db, engine());
}

}  // namespace pitchdsp
