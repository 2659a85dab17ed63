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

#include "pitchdsp/pitch_guide.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pitchdsp {

double GuideConfig::bins_per_octave() const {
  return (bins - 1) / std::log2(f_hi_hz / f_lo_hz);
}

std::vector<double> guide_frequency_axis(const GuideConfig& config) {
  std::vector<double> axis(static_cast<std::size_t>(config.bins));
  const double ratio = config.f_hi_hz / config.f_lo_hz;
  for (int i = 0; i < config.bins; ++i) {
    axis[static_cast<std::size_t>(i)] =
        config.f_lo_hz * std::pow(ratio, static_cast<double>(i) / (config.bins - 1));
  }
  axis.front() = config.f_lo_hz;
  axis.back() = config.f_hi_hz;
  return axis;
}

Matrix shs(const Matrix& fine_spec_exp, int sample_rate, int fft_size, const GuideConfig& config) {
  const auto axis = guide_frequency_axis(config);
  const std::size_t bins = fine_spec_exp.cols();
  const double max_pos = static_cast<double>(bins - 1);
  const double hz_to_bin = static_cast<double>(fft_size) / sample_rate;

  // Interpolation taps are identical for every frame; precompute them.
  struct Tap {
    std::size_t f;
    std::size_t k;
    double w_lo;
    double w_hi;
  };
  std::vector<Tap> taps;
  for (std::size_t f = 0; f < axis.size(); ++f) {
    double weight = 1.0;
    for (int n = 1; n <= config.n_harmonics; ++n, weight *= config.decay) {
      const double pos = n * axis[f] * hz_to_bin;
      if (pos > max_pos) break;
      const auto k = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(k);
      if (k + 1 <= bins - 1) {
        taps.push_back({f, k, weight * (1.0 - frac), weight * frac});
      } else {
        taps.push_back({f, k, weight, 0.0});
      }
    }
  }

  Matrix out(fine_spec_exp.rows(), axis.size());
  for (std::size_t t = 0; t < fine_spec_exp.rows(); ++t) {
    const auto in = fine_spec_exp.row(t);
    auto row = out.row(t);
    for (const auto& tap : taps) {
      double v = tap.w_lo * in[tap.k];
      if (tap.w_hi != 0.0) v += tap.w_hi * in[tap.k + 1];
      row[tap.f] += v;
    }
  }
  return out;
}

PitchGuide build_pitch_guide(const AmplitudeSpectrogram& s, const SpectralConfig& spectral,
                             const GuideConfig& config) {
  const auto psi = fine_structure(s, spectral.lifter_cutoff_s, spectral.amplitude_floor);
  Matrix exp_psi(psi.values.rows(), psi.values.cols());
  std::vector<bool> silent(s.frames(), false);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    const auto row = s.values.row(t);
    silent[t] = std::all_of(row.begin(), row.end(),
                            [&](double v) { return v <= spectral.amplitude_floor; });
    if (silent[t]) continue;  // leave the SHS input at zero
    for (std::size_t k = 0; k < s.bins(); ++k) exp_psi(t, k) = std::exp(psi.values(t, k));
  }

  PitchGuide g;
  g.freq_axis = guide_frequency_axis(config);
  g.frame_shift_s = s.frame_shift_s;
  g.values = shs(exp_psi, s.sample_rate, s.fft_size, config);
  for (std::size_t t = 0; t < g.values.rows(); ++t) {
    auto row = g.values.row(t);
    const double peak = *std::max_element(row.begin(), row.end());
    if (!(peak > 0.0)) {
      silent[t] = true;
      std::fill(row.begin(), row.end(), 0.0);
      continue;
    }
    for (double& v : row) v /= peak;
  }
  g.silent = std::move(silent);
  return g;
}

namespace {

void check_axes(const PitchDistribution& p, const PitchGuide& g) {
  if (p.values.rows() != g.values.rows() || p.values.cols() != g.values.cols() ||
      p.freq_axis.size() != g.freq_axis.size()) {
    throw std::invalid_argument("guide loss: distribution and guide shapes differ");
  }
  for (std::size_t i = 0; i < p.freq_axis.size(); ++i) {
    if (std::abs(p.freq_axis[i] - g.freq_axis[i]) > 1e-9 * g.freq_axis[i]) {
      throw std::invalid_argument("guide loss: frequency axes differ");
    }
  }
}

double hinge_average(const PitchDistribution& p, const PitchGuide& g, int shift, double m) {
  check_axes(p, g);
  const auto bins = static_cast<long long>(g.values.cols());
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < g.values.rows(); ++t) {
    if (!g.silent.empty() && g.silent[t]) continue;
    double inner = 0.0;
    for (long long f = 0; f < bins; ++f) {
      const long long src = f - shift;
      if (src < 0 || src >= bins) continue;
      inner += p.values(t, static_cast<std::size_t>(f)) * g.values(t, static_cast<std::size_t>(src));
    }
    total += std::max(1.0 - inner - m, 0.0);
    ++used;
  }
  return used == 0 ? 0.0 : total / static_cast<double>(used);
}

}  // namespace

double guide_loss(const PitchDistribution& p, const PitchGuide& g, double m) {
  return hinge_average(p, g, 0, m);
}

double shifted_guide_loss(const PitchDistribution& p_shift, const PitchGuide& g, int delta_f_bins,
                          double m) {
  return hinge_average(p_shift, g, delta_f_bins, m);
}

int cqt_shift_to_guide_bins(int d_bins, int cqt_bins_per_octave, const GuideConfig& config) {
  return static_cast<int>(
      std::lround(static_cast<double>(d_bins) / cqt_bins_per_octave * config.bins_per_octave()));
}

GuideSample guide_value_at(const PitchGuide& g, std::size_t t, double f0_hz) {
  const auto& axis = g.freq_axis;
  const std::size_t n = axis.size();
  const double lo = std::log2(axis.front());
  const double span = std::log2(axis.back()) - lo;
  const double per_bin = static_cast<double>(n - 1) / span;

  GuideSample out;
  double pos = (std::log2(f0_hz) - lo) * per_bin;
  if (!(pos >= 0.0)) {  // also catches NaN
    pos = 0.0;
    out.clamped = true;
  } else if (pos > static_cast<double>(n - 1)) {
    pos = static_cast<double>(n - 1);
    out.clamped = true;
  }
  auto i = static_cast<std::size_t>(pos);
  if (i >= n - 1) i = n - 2;
  const double frac = pos - static_cast<double>(i);
  const double a = g.values(t, i);
  const double b = g.values(t, i + 1);
  out.value = a + frac * (b - a);
  out.slope = out.clamped ? 0.0 : (b - a) * per_bin;
  return out;
}

}  // namespace pitchdsp
