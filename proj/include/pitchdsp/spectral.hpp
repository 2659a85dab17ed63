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

#include <complex>
#include <span>
#include <vector>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/matrix.hpp"

namespace pitchdsp {

struct SpectralConfig {
  int fft_size = 2048;
  double frame_shift_s = 0.005;
  double amplitude_floor = 1e-5;
  // Quefrency at which the lag window reaches zero; flat below half of it.
  double lifter_cutoff_s = 0.0018;
};

// T x (K+1) STFT magnitudes for bins k = 0..K, K = fft_size / 2 (k = K is
// Nyquist). Bin k sits at k * sample_rate / fft_size Hz.
struct AmplitudeSpectrogram {
  Matrix values;
  double frame_shift_s = 0.005;
  int sample_rate = kInternalSampleRate;
  int fft_size = 2048;

  std::size_t frames() const { return values.rows(); }
  std::size_t bins() const { return values.cols(); }
  int half_size() const { return fft_size / 2; }
  double bin_hz(std::size_t k) const {
    return static_cast<double>(k) * sample_rate / fft_size;
  }
};

// Natural-log amplitude envelope, same shape as the spectrogram it came from.
struct SpectralEnvelope {
  Matrix log_values;
};

struct FineStructureSpectrum {
  Matrix values;
};

enum class WindowType { kHann, kRectangular };

int hop_samples(int sample_rate, double frame_shift_s);
std::size_t frame_count(std::size_t num_samples, int hop);
// Periodic window of the given length.
std::vector<double> make_window(WindowType type, int length);

AmplitudeSpectrogram stft_amplitude(const Waveform& w, int fft_size = 2048,
                                    double frame_shift_s = 0.005,
                                    WindowType window = WindowType::kHann);

// Complex STFT, same framing as stft_amplitude. Returned as T rows of K+1 bins.
std::vector<std::vector<std::complex<double>>> stft_complex(
    const Waveform& w, int fft_size, double frame_shift_s, WindowType window = WindowType::kHann);

// log(max(S, floor)) elementwise.
Matrix log_floored(const Matrix& amplitude, double floor);

// Low-pass liftering of a one-sided log spectrum (bins 0..K). The log
// spectrum is treated as the even extension of length 2K, so the real
// cepstrum is a type-I DCT and the operator is linear and real.
class LagWindowLifter {
 public:
  LagWindowLifter(std::size_t bins, int sample_rate, double cutoff_s);

  std::size_t bins() const { return bins_; }
  const std::vector<double>& lag_window() const { return window_; }

  // out = W(in): the smooth envelope.
  void envelope(std::span<const double> log_spectrum, std::span<double> out) const;
  // out = (I - W)(in): the fine structure.
  void fine(std::span<const double> log_spectrum, std::span<double> out) const;
  // out = (I - W)^T g. W^T = D W D^{-1} with D = diag(1, 2, ..., 2, 1).
  void fine_adjoint(std::span<const double> g, std::span<double> out) const;

  Matrix envelope(const Matrix& log_spectrum) const;
  Matrix fine(const Matrix& log_spectrum) const;

 private:
  std::size_t bins_;
  std::vector<double> window_;
};

SpectralEnvelope lag_window_envelope(const AmplitudeSpectrogram& s,
                                     double lifter_cutoff_s = 0.0018,
                                     double amplitude_floor = 1e-5);

// psi(S) = log(max(S, floor)) - W(log(max(S, floor))).
FineStructureSpectrum fine_structure(const AmplitudeSpectrogram& s,
                                     double lifter_cutoff_s = 0.0018,
                                     double amplitude_floor = 1e-5);

// Minimum-phase spectrum for one frame of natural-log magnitudes (bins 0..K)
// via cepstral folding. |out[k]| == exp(log_magnitude[k]).
void minimum_phase_spectrum(std::span<const double> log_magnitude,
                            std::span<std::complex<double>> out);

std::vector<std::vector<std::complex<double>>> minimum_phase_response(const Matrix& log_magnitude);

// Real impulse response (length 2K) of a minimum-phase spectrum.
std::vector<double> minimum_phase_impulse(std::span<const double> log_magnitude);

}  // namespace pitchdsp
