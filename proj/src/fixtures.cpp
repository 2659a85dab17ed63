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

#include "pitchdsp/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pitchdsp {

std::vector<Formant> default_formants() {
  return {{700.0, 130.0, 1.0}, {1220.0, 70.0, 1.0}, {2600.0, 160.0, 1.0}};
}

namespace {

constexpr double kMinFixtureF0 = 50.0;
constexpr double kMaxFixtureF0 = 800.0;

bool in_unvoiced(const VowelOptions& o, double t) {
  for (const auto& [begin, end] : o.unvoiced) {
    if (t >= begin && t < end) return true;
  }
  return false;
}

double ramp(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * x);
}

// 1 inside unvoiced ranges, 0 well outside, raised-cosine across each edge.
double unvoiced_weight(const VowelOptions& o, double t) {
  double w = 0.0;
  const double half = 0.5 * o.fade_s;
  for (const auto& [begin, end] : o.unvoiced) {
    if (o.fade_s <= 0.0) {
      w = std::max(w, t >= begin && t < end ? 1.0 : 0.0);
      continue;
    }
    const double rise = ramp((t - begin + half) / o.fade_s);
    const double fall = 1.0 - ramp((t - end + half) / o.fade_s);
    w = std::max(w, std::min(rise, fall));
  }
  return w;
}

double rms(const std::vector<double>& x) {
  double total = 0.0;
  for (double v : x) total += v * v;
  return x.empty() ? 0.0 : std::sqrt(total / static_cast<double>(x.size()));
}

// y[n] = b0 x[n] - a1 y[n-1] - a2 y[n-2], with b0 set for unit gain at the
// center frequency.
void resonate(std::vector<double>& x, const Formant& f, int sample_rate) {
  const double r = std::exp(-std::numbers::pi * f.bandwidth_hz / sample_rate);
  const double theta = 2.0 * std::numbers::pi * f.center_hz / sample_rate;
  const double a1 = -2.0 * r * std::cos(theta);
  const double a2 = r * r;
  const std::complex<double> z = std::polar(1.0, -theta);
  const double b0 = std::abs(1.0 + a1 * z + a2 * z * z);
  double y1 = 0.0;
  double y2 = 0.0;
  for (double& v : x) {
    const double y = f.gain * b0 * v - a1 * y1 - a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

}  // namespace

VowelFixture make_vowel(const std::function<double(double)>& f0_of_time,
                        const VowelOptions& options) {
  if (!(options.duration_s > 0.0) || options.sample_rate <= 0 || !(options.frame_shift_s > 0.0)) {
    throw std::invalid_argument("make_vowel: bad options");
  }
  const auto n = static_cast<std::size_t>(std::llround(options.duration_s * options.sample_rate));
  const double fs = options.sample_rate;
  std::mt19937_64 engine(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> source(n);
  double phase = 0.0;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double f0 = f0_of_time(static_cast<double>(i) / fs);
    if (f0 < kMinFixtureF0 || f0 > kMaxFixtureF0) {
      throw std::invalid_argument("make_vowel: F0 outside [50, 800] Hz");
    }
    const int count = static_cast<int>(std::ceil(0.5 * fs / f0)) - 1;
    double sum = 0.0;
    for (int h = 1; h <= count; ++h) sum += std::sin(h * phase);
    source[i] = sum / std::sqrt(static_cast<double>(count));
    if (options.noise_floor > 0.0) source[i] += options.noise_floor * normal(engine);
    phase += two_pi * f0 / fs;
    if (phase >= two_pi) phase -= two_pi;
  }
  const auto fade = std::min(static_cast<std::size_t>(std::llround(options.fade_s * fs)), n / 2);
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = ramp((static_cast<double>(i) + 0.5) / static_cast<double>(fade));
    source[i] *= g;
    source[n - 1 - i] *= g;
  }
  for (const auto& f : options.formants) resonate(source, f, options.sample_rate);

  if (!options.unvoiced.empty()) {
    std::vector<double> noise(n);
    for (double& v : noise) v = normal(engine);
    if (options.filter_unvoiced) {
      for (const auto& f : options.formants) resonate(noise, f, options.sample_rate);
    }
    const double noise_rms = rms(noise);
    const double scale = noise_rms > 0.0 ? options.unvoiced_level * rms(source) / noise_rms : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = unvoiced_weight(options, static_cast<double>(i) / fs);
      source[i] = (1.0 - u) * source[i] + u * scale * noise[i];
    }
  }

  VowelFixture fx;
  fx.waveform.sample_rate = options.sample_rate;
  fx.waveform.samples = std::move(source);
  const auto frames =
      static_cast<std::size_t>(std::ceil(options.duration_s / options.frame_shift_s - 1e-9));
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) * options.frame_shift_s;
    fx.labels.times.push_back(t);
    fx.labels.f0_hz.push_back(in_unvoiced(options, t) ? 0.0 : f0_of_time(t));
  }
  return fx;
}

VowelFixture make_vowel(const PitchTrack& f0_contour, const VowelOptions& options) {
  if (f0_contour.size() == 0) throw std::invalid_argument("make_vowel: empty contour");
  const double shift = options.frame_shift_s;
  return make_vowel(
      [&f0_contour, shift](double t) {
        const double pos = t / shift;
        const auto i = static_cast<std::size_t>(pos);
        if (i + 1 >= f0_contour.size()) return f0_contour.hz(f0_contour.size() - 1);
        const double frac = pos - static_cast<double>(i);
        return (1.0 - frac) * f0_contour.hz(i) + frac * f0_contour.hz(i + 1);
      },
      options);
}

VowelFixture make_flat_vowel(double f0_hz, const VowelOptions& options) {
  return make_vowel([f0_hz](double) { return f0_hz; }, options);
}

VowelFixture make_vibrato_vowel(double f0_hz, double depth_semitones, double rate_hz,
                                const VowelOptions& options) {
  return make_vowel(
      [=](double t) {
        return f0_hz * std::exp2(depth_semitones / 12.0 *
                                 std::sin(2.0 * std::numbers::pi * rate_hz * t));
      },
      options);
}

void write_fixture(const std::filesystem::path& dir, const std::string& name,
                   const VowelFixture& fixture) {
  std::filesystem::create_directories(dir);
  save_wav(dir / (name + ".wav"), fixture.waveform);
  save_pitch_labels(dir / (name + ".f0"), fixture.labels);
}

std::vector<double> finite_difference_oracle(
    const std::function<double(std::span<const double>)>& f, std::vector<double> params,
    double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference_oracle: step must be positive");
  std::vector<double> grad(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double x = params[i];
    params[i] = x + step;
    const double up = f(params);
    params[i] = x - step;
    const double down = f(params);
    params[i] = x;
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

}  // namespace pitchdsp
