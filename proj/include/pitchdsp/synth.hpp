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
#include <vector>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/features.hpp"
#include "pitchdsp/matrix.hpp"
#include "pitchdsp/pitch_track.hpp"
#include "pitchdsp/spectral.hpp"

namespace pitchdsp {

inline constexpr int kBapBands = 8;

// Band centers for the band aperiodicity, in Hz.
std::vector<double> default_bap_anchors_hz();

// For each bin k: A_k = exp((1 - lambda_k) log B_lower + lambda_k log B_lower+1),
// interpolating linearly in frequency between anchors and holding the end
// values constant beyond them.
struct BandInterpolation {
  std::vector<std::size_t> lower;
  std::vector<double> lambda;
  std::size_t bands = 0;

  std::size_t bins() const { return lower.size(); }
};

BandInterpolation make_band_interpolation(std::size_t bins, int sample_rate, int fft_size,
                                          const std::vector<double>& anchors_hz);

Aperiodicity bap_to_aperiodicity(const BandAperiodicity& b, const BandInterpolation& interp);
Aperiodicity bap_to_aperiodicity(const BandAperiodicity& b, std::size_t bins,
                                 int sample_rate = kInternalSampleRate, int fft_size = 2048);

double sigmoid(double u);
double logit(double b);
BandAperiodicity bap_from_logits(const Matrix& logits);
Matrix logits_from_bap(const BandAperiodicity& b);

// Number of harmonics h >= 1 with h * f0 < fs / 2.
int harmonic_count(double f0_hz, int sample_rate);

// Sum of sinusoids at every harmonic below Nyquist, F0 linearly
// interpolated between frame centers (t * hop), scaled by 1/sqrt(count).
Waveform harmonic_excitation(const PitchTrack& p, int sample_rate, int hop,
                             std::size_t num_samples);

// Gaussian noise with the same mean power (1/2) as harmonic_excitation.
Waveform aperiodic_excitation(std::size_t num_samples, std::uint64_t seed,
                              int sample_rate = kInternalSampleRate);

// Scale that maps |STFT| of a unit-power-matched excitation to roughly unit
// magnitude per bin; applied to both excitation spectra of the frequency-
// domain synthesizer model.
double excitation_normalization(int fft_size);

Matrix excitation_spectrogram(const Waveform& e, int fft_size, double frame_shift_s);

struct SynthesisResult {
  Waveform waveform;
  AmplitudeSpectrogram periodic_spec;
  AmplitudeSpectrogram aperiodic_spec;
};

struct SynthesisConfig {
  int fft_size = 2048;
  double frame_shift_s = 0.005;
  int sample_rate = kInternalSampleRate;
};

// Time-domain synthesis: each branch's excitation is cut into Hann-windowed
// segments (length 2 * hop, 50% overlap), convolved with the frame's
// minimum-phase response of the branch gain (periodic: H(1-A), aperiodic:
// H A) and overlap-added. Noise depends only on `seed`.
SynthesisResult synthesize(const PitchTrack& p, const SpectralEnvelope& envelope,
                           const Aperiodicity& aperiodicity, std::uint64_t seed,
                           std::size_t num_samples, const SynthesisConfig& config = {});

// ||psi(S1) - psi(S)||_1 - alpha ||psi(S1) - psi(S2)||_1, both as means.
double ged_reconstruction_loss(const Matrix& s_tilde_1, const Matrix& s_tilde_2, const Matrix& s,
                               double alpha, const LagWindowLifter& lifter,
                               double amplitude_floor = 1e-5);

// Fixed quantities for the reconstruction loss as a function of BAP logits.
// The synthesizer spectrogram follows the frequency-domain form
//   S~ = E_p . H . (1 - A) + E_ap . H . A
// with E_p, E_ap the normalized excitation spectrograms.
struct ReconContext {
  Matrix target_fine;          // psi(S)
  Matrix envelope_amplitude;   // H
  Matrix periodic_excitation;  // E_p
  Matrix aperiodic_excitation_1;
  Matrix aperiodic_excitation_2;
  BandInterpolation interp;
  // Frames that enter the loss; empty means all.
  std::vector<std::uint8_t> frame_mask;
  double alpha = 0.1;
  double amplitude_floor = 1e-5;
  double lifter_cutoff_s = 0.0018;
  int sample_rate = kInternalSampleRate;
};

ReconContext make_recon_context(const PitchTrack& p, const SpectralEnvelope& envelope,
                                const AmplitudeSpectrogram& target, std::uint64_t seed_1,
                                std::uint64_t seed_2, double alpha = 0.1,
                                const SpectralConfig& spectral = {},
                                const std::vector<double>& anchors_hz = default_bap_anchors_hz());

class ReconObjective {
 public:
  explicit ReconObjective(ReconContext context);

  const ReconContext& context() const { return ctx_; }
  std::size_t frames() const { return ctx_.target_fine.rows(); }
  double normalizer() const;

  // Unnormalized contribution of frame t for one row of BAP logits.
  double frame_loss(std::size_t t, std::span<const double> logits,
                    std::span<double> grad = {}) const;

  double loss(const Matrix& logits) const;
  double loss_and_grad(const Matrix& logits, Matrix& grad) const;

 private:
  bool included(std::size_t t) const;

  ReconContext ctx_;
  LagWindowLifter lifter_;
  std::size_t included_frames_ = 0;
};

// Gradient of the reconstruction loss with respect to the BAP logits.
Matrix recon_loss_grad_bap(const BandAperiodicity& b, const ReconContext& context);

// v' = M_p / (M_p + M_ap) with M_p = sum_k H (1 - A), M_ap = sum_k H A;
// voiced iff v' >= theta.
VoicingMask detect_voicing(const SpectralEnvelope& envelope, const Aperiodicity& a,
                           double theta = 0.5);

}  // namespace pitchdsp
