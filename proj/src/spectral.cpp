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

#include "pitchdsp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pitchdsp/fft.hpp"

namespace pitchdsp {

int hop_samples(int sample_rate, double frame_shift_s) {
  const int hop = static_cast<int>(std::lround(frame_shift_s * sample_rate));
  if (hop <= 0) throw std::invalid_argument("frame shift must be at least one sample");
  return hop;
}

std::size_t frame_count(std::size_t num_samples, int hop) {
  return num_samples / static_cast<std::size_t>(hop) + 1;
}

std::vector<double> make_window(WindowType type, int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (type == WindowType::kHann) {
    for (int n = 0; n < length; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
    }
  }
  return w;
}

namespace {

void check_fft_size(int fft_size) {
  if (fft_size < 4 || (fft_size & (fft_size - 1)) != 0) {
    throw std::invalid_argument("fft_size must be a power of two >= 4");
  }
}

// Fills frame t with the windowed, zero-padded segment centered at t * hop.
void load_frame(const std::vector<double>& x, std::size_t t, int hop,
                const std::vector<double>& window, std::vector<double>& frame) {
  const auto n = static_cast<long long>(window.size());
  const long long start = static_cast<long long>(t) * hop - n / 2;
  const auto len = static_cast<long long>(x.size());
  for (long long i = 0; i < n; ++i) {
    const long long j = start + i;
    frame[static_cast<std::size_t>(i)] =
        (j >= 0 && j < len) ? x[static_cast<std::size_t>(j)] * window[static_cast<std::size_t>(i)]
                            : 0.0;
  }
}

}  // namespace

std::vector<std::vector<std::complex<double>>> stft_complex(const Waveform& w, int fft_size,
                                                            double frame_shift_s,
                                                            WindowType window_type) {
  check_fft_size(fft_size);
  if (w.samples.empty()) throw std::invalid_argument("stft: empty waveform");
  const int hop = hop_samples(w.sample_rate, frame_shift_s);
  const std::size_t frames = frame_count(w.samples.size(), hop);
  const auto window = make_window(window_type, fft_size);
  auto& fft = RealFft::cached(static_cast<std::size_t>(fft_size));

  std::vector<std::vector<std::complex<double>>> out(frames);
  std::vector<double> frame(static_cast<std::size_t>(fft_size));
  for (std::size_t t = 0; t < frames; ++t) {
    load_frame(w.samples, t, hop, window, frame);
    out[t].resize(fft.bins());
    fft.forward(frame, out[t]);
  }
  return out;
}

AmplitudeSpectrogram stft_amplitude(const Waveform& w, int fft_size, double frame_shift_s,
                                    WindowType window_type) {
  check_fft_size(fft_size);
  if (w.samples.empty()) throw std::invalid_argument("stft: empty waveform");
  const int hop = hop_samples(w.sample_rate, frame_shift_s);
  const std::size_t frames = frame_count(w.samples.size(), hop);
  const auto window = make_window(window_type, fft_size);
  auto& fft = RealFft::cached(static_cast<std::size_t>(fft_size));

  AmplitudeSpectrogram s;
  s.frame_shift_s = frame_shift_s;
  s.sample_rate = w.sample_rate;
  s.fft_size = fft_size;
  s.values = Matrix(frames, fft.bins());
  std::vector<double> frame(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    load_frame(w.samples, t, hop, window, frame);
    fft.forward(frame, spec);
    auto row = s.values.row(t);
    for (std::size_t k = 0; k < spec.size(); ++k) {
      row[k] = std::sqrt(spec[k].real() * spec[k].real() + spec[k].imag() * spec[k].imag());
    }
  }
  return s;
}

Matrix log_floored(const Matrix& amplitude, double floor) {
  Matrix out(amplitude.rows(), amplitude.cols());
  auto& dst = out.data();
  const auto& src = amplitude.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::log(std::max(src[i], floor));
  return out;
}

LagWindowLifter::LagWindowLifter(std::size_t bins, int sample_rate, double cutoff_s)
    : bins_(bins), window_(bins, 0.0) {
  if (bins < 3) throw std::invalid_argument("LagWindowLifter: need at least 3 bins");
  if (!(cutoff_s > 0.0)) throw std::invalid_argument("LagWindowLifter: cutoff must be positive");
  const double cut = cutoff_s * sample_rate;
  const double flat = 0.5 * cut;
  for (std::size_t q = 0; q < bins; ++q) {
    const auto qd = static_cast<double>(q);
    if (qd < flat) {
      window_[q] = 1.0;
    } else if (qd < cut) {
      window_[q] = 0.5 * (1.0 + std::cos(std::numbers::pi * (qd - flat) / (cut - flat)));
    }
  }
}

void LagWindowLifter::envelope(std::span<const double> log_spectrum, std::span<double> out) const {
  auto& dct = Dct1::cached(bins_);
  std::vector<double> cep(bins_);
  dct.transform(log_spectrum, cep);
  for (std::size_t q = 0; q < bins_; ++q) cep[q] *= window_[q];
  dct.transform(cep, out);
  const double scale = 1.0 / (2.0 * static_cast<double>(bins_ - 1));
  for (std::size_t k = 0; k < bins_; ++k) out[k] *= scale;
}

void LagWindowLifter::fine(std::span<const double> log_spectrum, std::span<double> out) const {
  std::vector<double> env(bins_);
  envelope(log_spectrum, env);
  for (std::size_t k = 0; k < bins_; ++k) out[k] = log_spectrum[k] - env[k];
}

void LagWindowLifter::fine_adjoint(std::span<const double> g, std::span<double> out) const {
  std::vector<double> scaled(g.begin(), g.end());
  for (std::size_t k = 1; k + 1 < bins_; ++k) scaled[k] *= 0.5;
  std::vector<double> env(bins_);
  envelope(scaled, env);
  for (std::size_t k = 0; k < bins_; ++k) {
    const double d = (k == 0 || k + 1 == bins_) ? 1.0 : 2.0;
    out[k] = g[k] - d * env[k];
  }
}

Matrix LagWindowLifter::envelope(const Matrix& log_spectrum) const {
  Matrix out(log_spectrum.rows(), log_spectrum.cols());
  for (std::size_t t = 0; t < log_spectrum.rows(); ++t) envelope(log_spectrum.row(t), out.row(t));
  return out;
}

Matrix LagWindowLifter::fine(const Matrix& log_spectrum) const {
  Matrix out(log_spectrum.rows(), log_spectrum.cols());
  for (std::size_t t = 0; t < log_spectrum.rows(); ++t) fine(log_spectrum.row(t), out.row(t));
  return out;
}

SpectralEnvelope lag_window_envelope(const AmplitudeSpectrogram& s, double lifter_cutoff_s,
                                     double amplitude_floor) {
  const LagWindowLifter lifter(s.bins(), s.sample_rate, lifter_cutoff_s);
  return {lifter.envelope(log_floored(s.values, amplitude_floor))};
}

FineStructureSpectrum fine_structure(const AmplitudeSpectrogram& s, double lifter_cutoff_s,
                                     double amplitude_floor) {
  const LagWindowLifter lifter(s.bins(), s.sample_rate, lifter_cutoff_s);
  return {lifter.fine(log_floored(s.values, amplitude_floor))};
}

void minimum_phase_spectrum(std::span<const double> log_magnitude,
                            std::span<std::complex<double>> out) {
  const std::size_t bins = log_magnitude.size();
  const std::size_t half = bins - 1;
  auto& dct = Dct1::cached(bins);
  std::vector<double> cep(bins);
  dct.transform(log_magnitude, cep);

  // Fold negative quefrencies onto positive ones.
  std::vector<double> folded(2 * half, 0.0);
  const double scale = 1.0 / (2.0 * static_cast<double>(half));
  folded[0] = cep[0] * scale;
  for (std::size_t q = 1; q < half; ++q) folded[q] = 2.0 * cep[q] * scale;
  folded[half] = cep[half] * scale;

  auto& fft = RealFft::cached(2 * half);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(folded, spec);
  for (std::size_t k = 0; k < bins; ++k) {
    out[k] = std::polar(std::exp(log_magnitude[k]), spec[k].imag());
  }
}

std::vector<std::vector<std::complex<double>>> minimum_phase_response(const Matrix& log_magnitude) {
  std::vector<std::vector<std::complex<double>>> out(log_magnitude.rows());
  for (std::size_t t = 0; t < log_magnitude.rows(); ++t) {
    out[t].resize(log_magnitude.cols());
    minimum_phase_spectrum(log_magnitude.row(t), out[t]);
  }
  return out;
}

std::vector<double> minimum_phase_impulse(std::span<const double> log_magnitude) {
  const std::size_t bins = log_magnitude.size();
  std::vector<std::complex<double>> spec(bins);
  minimum_phase_spectrum(log_magnitude, spec);
  const std::size_t n = 2 * (bins - 1);
  auto& fft = RealFft::cached(n);
  std::vector<double> h(n);
  fft.inverse(spec, h);
  for (double& v : h) v /= static_cast<double>(n);
  return h;
}

}  // namespace pitchdsp
