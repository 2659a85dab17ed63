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

#include "pitchdsp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pitchdsp/fft.hpp"

namespace pitchdsp {

namespace {

constexpr double kNoiseStd = 0.70710678118654752440;  // matches the harmonic branch power

}  // namespace

void BandAperiodicity::clamp() {
  for (double& v : values.data()) v = std::clamp(v, kBapMin, kBapMax);
}

std::size_t VoicingMask::voiced_count() const {
  return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(),
                                                [](auto f) { return f != 0; }));
}

std::vector<double> default_bap_anchors_hz() {
  return {0.0, 375.0, 750.0, 1500.0, 3000.0, 6000.0, 9000.0, 12000.0};
}

BandInterpolation make_band_interpolation(std::size_t bins, int sample_rate, int fft_size,
                                          const std::vector<double>& anchors_hz) {
  if (anchors_hz.size() < 2) throw std::invalid_argument("band interpolation: need >= 2 anchors");
  for (std::size_t i = 1; i < anchors_hz.size(); ++i) {
    if (!(anchors_hz[i] > anchors_hz[i - 1])) {
      throw std::invalid_argument("band interpolation: anchors must increase");
    }
  }
  BandInterpolation interp;
  interp.bands = anchors_hz.size();
  interp.lower.resize(bins);
  interp.lambda.resize(bins);
  const std::size_t last = anchors_hz.size() - 1;
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * sample_rate / fft_size;
    if (f <= anchors_hz.front()) {
      interp.lower[k] = 0;
      interp.lambda[k] = 0.0;
    } else if (f >= anchors_hz.back()) {
      interp.lower[k] = last - 1;
      interp.lambda[k] = 1.0;
    } else {
      const auto it = std::upper_bound(anchors_hz.begin(), anchors_hz.end(), f);
      const auto i = static_cast<std::size_t>(it - anchors_hz.begin()) - 1;
      interp.lower[k] = i;
      interp.lambda[k] = (f - anchors_hz[i]) / (anchors_hz[i + 1] - anchors_hz[i]);
    }
  }
  return interp;
}

Aperiodicity bap_to_aperiodicity(const BandAperiodicity& b, const BandInterpolation& interp) {
  if (b.values.cols() != interp.bands) {
    throw std::invalid_argument("bap_to_aperiodicity: band count mismatch");
  }
  Aperiodicity a{Matrix(b.values.rows(), interp.bins())};
  std::vector<double> log_b(interp.bands);
  for (std::size_t t = 0; t < b.values.rows(); ++t) {
    for (std::size_t i = 0; i < interp.bands; ++i) {
      log_b[i] = std::log(std::clamp(b.values(t, i), kBapMin, kBapMax));
    }
    for (std::size_t k = 0; k < interp.bins(); ++k) {
      const std::size_t i = interp.lower[k];
      const double lam = interp.lambda[k];
      const double hi = lam > 0.0 ? log_b[i + 1] : 0.0;
      a.values(t, k) = std::exp((1.0 - lam) * log_b[i] + lam * hi);
    }
  }
  return a;
}

Aperiodicity bap_to_aperiodicity(const BandAperiodicity& b, std::size_t bins, int sample_rate,
                                 int fft_size) {
  return bap_to_aperiodicity(
      b, make_band_interpolation(bins, sample_rate, fft_size, default_bap_anchors_hz()));
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double logit(double b) {
  const double c = std::clamp(b, kBapMin, kBapMax);
  return std::log(c / (1.0 - c));
}

BandAperiodicity bap_from_logits(const Matrix& logits) {
  BandAperiodicity b{Matrix(logits.rows(), logits.cols())};
  for (std::size_t i = 0; i < logits.data().size(); ++i) {
    b.values.data()[i] = std::clamp(sigmoid(logits.data()[i]), kBapMin, kBapMax);
  }
  return b;
}

Matrix logits_from_bap(const BandAperiodicity& b) {
  Matrix u(b.values.rows(), b.values.cols());
  for (std::size_t i = 0; i < u.data().size(); ++i) u.data()[i] = logit(b.values.data()[i]);
  return u;
}

int harmonic_count(double f0_hz, int sample_rate) {
  if (!(f0_hz > 0.0)) return 0;
  return static_cast<int>(std::ceil(0.5 * sample_rate / f0_hz)) - 1;
}

Waveform harmonic_excitation(const PitchTrack& p, int sample_rate, int hop,
                             std::size_t num_samples) {
  if (p.size() == 0) throw std::invalid_argument("harmonic_excitation: empty pitch track");
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.assign(num_samples, 0.0);
  const double two_pi = 2.0 * std::numbers::pi;
  double phase = 0.0;
  for (std::size_t n = 0; n < num_samples; ++n) {
    const double pos = static_cast<double>(n) / hop;
    const auto t = static_cast<std::size_t>(pos);
    double f0 = 0.0;
    if (t + 1 >= p.size()) {
      f0 = p.hz(p.size() - 1);
    } else {
      const double frac = pos - static_cast<double>(t);
      f0 = (1.0 - frac) * p.hz(t) + frac * p.hz(t + 1);
    }
    const int count = harmonic_count(f0, sample_rate);
    double sum = 0.0;
    const double half_sin = std::sin(0.5 * phase);
    if (std::abs(half_sin) > 1e-6) {
      sum = std::sin(0.5 * count * phase) * std::sin(0.5 * (count + 1) * phase) / half_sin;
    } else {
      for (int h = 1; h <= count; ++h) sum += std::sin(h * phase);
    }
    out.samples[n] = count > 0 ? sum / std::sqrt(static_cast<double>(count)) : 0.0;
    phase += two_pi * f0 / sample_rate;
    if (phase >= two_pi) phase -= two_pi;
  }
  return out;
}

Waveform aperiodic_excitation(std::size_t num_samples, std::uint64_t seed, int sample_rate) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, kNoiseStd);
  Waveform out;
  out.sample_rate = sample_rate;
  out.samples.resize(num_samples);
  for (double& v : out.samples) v = normal(engine);
  return out;
}

double excitation_normalization(int fft_size) {
  const auto w = make_window(WindowType::kHann, fft_size);
  double energy = 0.0;
  for (double v : w) energy += v * v;
  return 1.0 / (kNoiseStd * std::sqrt(energy));
}

Matrix excitation_spectrogram(const Waveform& e, int fft_size, double frame_shift_s) {
  Matrix m = stft_amplitude(e, fft_size, frame_shift_s).values;
  const double scale = excitation_normalization(fft_size);
  for (double& v : m.data()) v *= scale;
  return m;
}

namespace {

// Overlap-adds each frame's filtered excitation segment into the output.
Waveform filter_branch(const Waveform& excitation, const Matrix& log_gain, int hop, int fft_size) {
  const std::size_t frames = log_gain.rows();
  const int seg_len = 2 * hop;
  const int ir_len = fft_size;
  int conv_size = 1;
  while (conv_size < seg_len + ir_len - 1) conv_size *= 2;
  auto& fft = RealFft::cached(static_cast<std::size_t>(conv_size));
  const auto window = make_window(WindowType::kHann, seg_len);

  Waveform out;
  out.sample_rate = excitation.sample_rate;
  out.samples.assign(excitation.samples.size(), 0.0);
  const auto total = static_cast<long long>(excitation.samples.size());

  std::vector<double> seg(static_cast<std::size_t>(conv_size));
  std::vector<double> ir_buf(static_cast<std::size_t>(conv_size));
  std::vector<double> conv(static_cast<std::size_t>(conv_size));
  std::vector<std::complex<double>> seg_spec(fft.bins()), ir_spec(fft.bins());
  for (std::size_t t = 0; t < frames; ++t) {
    const long long start = static_cast<long long>(t) * hop - hop;
    if (start >= total) break;
    bool any = false;
    std::fill(seg.begin(), seg.end(), 0.0);
    for (int n = 0; n < seg_len; ++n) {
      const long long j = start + n;
      if (j < 0 || j >= total) continue;
      seg[static_cast<std::size_t>(n)] = excitation.samples[static_cast<std::size_t>(j)] * window[n];
      any = any || seg[static_cast<std::size_t>(n)] != 0.0;
    }
    if (!any) continue;
    const auto ir = minimum_phase_impulse(log_gain.row(t));
    std::fill(ir_buf.begin(), ir_buf.end(), 0.0);
    std::copy(ir.begin(), ir.end(), ir_buf.begin());
    fft.forward(seg, seg_spec);
    fft.forward(ir_buf, ir_spec);
    for (std::size_t k = 0; k < seg_spec.size(); ++k) seg_spec[k] *= ir_spec[k];
    fft.inverse(seg_spec, conv);
    const double scale = 1.0 / conv_size;
    for (int n = 0; n < seg_len + ir_len - 1; ++n) {
      const long long j = start + n;
      if (j < 0) continue;
      if (j >= total) break;
      out.samples[static_cast<std::size_t>(j)] += conv[static_cast<std::size_t>(n)] * scale;
    }
  }
  return out;
}

}  // namespace

SynthesisResult synthesize(const PitchTrack& p, const SpectralEnvelope& envelope,
                           const Aperiodicity& aperiodicity, std::uint64_t seed,
                           std::size_t num_samples, const SynthesisConfig& config) {
  require_same_shape(envelope.log_values, aperiodicity.values, "synthesize");
  if (p.size() != envelope.log_values.rows()) {
    throw std::invalid_argument("synthesize: pitch track and envelope frame counts differ");
  }
  if (envelope.log_values.cols() != static_cast<std::size_t>(config.fft_size / 2 + 1)) {
    throw std::invalid_argument("synthesize: envelope bins do not match fft_size");
  }
  const int hop = hop_samples(config.sample_rate, config.frame_shift_s);
  const double log_norm = std::log(excitation_normalization(config.fft_size));

  Matrix periodic_gain(envelope.log_values.rows(), envelope.log_values.cols());
  Matrix aperiodic_gain(envelope.log_values.rows(), envelope.log_values.cols());
  for (std::size_t i = 0; i < periodic_gain.data().size(); ++i) {
    const double h = envelope.log_values.data()[i] + log_norm;
    const double a = std::clamp(aperiodicity.values.data()[i], kBapMin, kBapMax);
    periodic_gain.data()[i] = h + std::log(1.0 - a);
    aperiodic_gain.data()[i] = h + std::log(a);
  }

  const Waveform e_p = harmonic_excitation(p, config.sample_rate, hop, num_samples);
  const Waveform e_ap = aperiodic_excitation(num_samples, seed, config.sample_rate);
  SynthesisResult r;
  const Waveform periodic = filter_branch(e_p, periodic_gain, hop, config.fft_size);
  const Waveform aperiodic = filter_branch(e_ap, aperiodic_gain, hop, config.fft_size);
  r.waveform.sample_rate = config.sample_rate;
  r.waveform.samples.resize(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) {
    r.waveform.samples[n] = periodic.samples[n] + aperiodic.samples[n];
  }
  if (num_samples > 0) {
    r.periodic_spec = stft_amplitude(periodic, config.fft_size, config.frame_shift_s);
    r.aperiodic_spec = stft_amplitude(aperiodic, config.fft_size, config.frame_shift_s);
  }
  return r;
}

double ged_reconstruction_loss(const Matrix& s_tilde_1, const Matrix& s_tilde_2, const Matrix& s,
                               double alpha, const LagWindowLifter& lifter,
                               double amplitude_floor) {
  require_same_shape(s_tilde_1, s, "ged_reconstruction_loss");
  require_same_shape(s_tilde_2, s, "ged_reconstruction_loss");
  const Matrix f1 = lifter.fine(log_floored(s_tilde_1, amplitude_floor));
  const Matrix f2 = lifter.fine(log_floored(s_tilde_2, amplitude_floor));
  const Matrix f = lifter.fine(log_floored(s, amplitude_floor));
  double attract = 0.0;
  double repel = 0.0;
  for (std::size_t i = 0; i < f.data().size(); ++i) {
    attract += std::abs(f1.data()[i] - f.data()[i]);
    repel += std::abs(f1.data()[i] - f2.data()[i]);
  }
  const auto n = static_cast<double>(f.data().size());
  return (attract - alpha * repel) / n;
}

ReconContext make_recon_context(const PitchTrack& p, const SpectralEnvelope& envelope,
                                const AmplitudeSpectrogram& target, std::uint64_t seed_1,
                                std::uint64_t seed_2, double alpha, const SpectralConfig& spectral,
                                const std::vector<double>& anchors_hz) {
  require_same_shape(envelope.log_values, target.values, "make_recon_context");
  const int hop = hop_samples(target.sample_rate, target.frame_shift_s);
  const std::size_t num_samples = (target.frames() - 1) * static_cast<std::size_t>(hop) + 1;

  ReconContext ctx;
  const LagWindowLifter lifter(target.bins(), target.sample_rate, spectral.lifter_cutoff_s);
  ctx.target_fine = lifter.fine(log_floored(target.values, spectral.amplitude_floor));
  ctx.envelope_amplitude = envelope.log_values;
  for (double& v : ctx.envelope_amplitude.data()) v = std::exp(v);
  ctx.periodic_excitation = excitation_spectrogram(
      harmonic_excitation(p, target.sample_rate, hop, num_samples), target.fft_size,
      target.frame_shift_s);
  ctx.aperiodic_excitation_1 = excitation_spectrogram(
      aperiodic_excitation(num_samples, seed_1, target.sample_rate), target.fft_size,
      target.frame_shift_s);
  ctx.aperiodic_excitation_2 = excitation_spectrogram(
      aperiodic_excitation(num_samples, seed_2, target.sample_rate), target.fft_size,
      target.frame_shift_s);
  ctx.interp = make_band_interpolation(target.bins(), target.sample_rate, target.fft_size, anchors_hz);
  ctx.alpha = alpha;
  ctx.amplitude_floor = spectral.amplitude_floor;
  ctx.lifter_cutoff_s = spectral.lifter_cutoff_s;
  ctx.sample_rate = target.sample_rate;
  return ctx;
}

ReconObjective::ReconObjective(ReconContext context)
    : ctx_(std::move(context)),
      lifter_(ctx_.target_fine.cols(), ctx_.sample_rate, ctx_.lifter_cutoff_s) {
  const auto& tf = ctx_.target_fine;
  require_same_shape(tf, ctx_.envelope_amplitude, "ReconObjective envelope");
  require_same_shape(tf, ctx_.periodic_excitation, "ReconObjective periodic excitation");
  require_same_shape(tf, ctx_.aperiodic_excitation_1, "ReconObjective aperiodic excitation");
  require_same_shape(tf, ctx_.aperiodic_excitation_2, "ReconObjective aperiodic excitation");
  if (ctx_.interp.bins() != tf.cols()) {
    throw std::invalid_argument("ReconObjective: interpolation bins mismatch");
  }
  if (!ctx_.frame_mask.empty() && ctx_.frame_mask.size() != tf.rows()) {
    throw std::invalid_argument("ReconObjective: frame mask length mismatch");
  }
  for (std::size_t t = 0; t < tf.rows(); ++t) included_frames_ += included(t) ? 1 : 0;
}

bool ReconObjective::included(std::size_t t) const {
  return ctx_.frame_mask.empty() || ctx_.frame_mask[t] != 0;
}

double ReconObjective::normalizer() const {
  if (included_frames_ == 0) return 0.0;
  return 1.0 / static_cast<double>(included_frames_ * ctx_.target_fine.cols());
}

double ReconObjective::frame_loss(std::size_t t, std::span<const double> logits,
                                  std::span<double> grad) const {
  const std::size_t bins = ctx_.target_fine.cols();
  const std::size_t bands = ctx_.interp.bands;
  const double floor = ctx_.amplitude_floor;
  std::vector<double> b(bands), log_b(bands);
  for (std::size_t i = 0; i < bands; ++i) {
    b[i] = std::clamp(sigmoid(logits[i]), kBapMin, kBapMax);
    log_b[i] = std::log(b[i]);
  }
  std::vector<double> a(bins), s1(bins), s2(bins), l1(bins), l2(bins), f1(bins), f2(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    const std::size_t i = ctx_.interp.lower[k];
    const double lam = ctx_.interp.lambda[k];
    a[k] = std::exp((1.0 - lam) * log_b[i] + (lam > 0.0 ? lam * log_b[i + 1] : 0.0));
    const double h = ctx_.envelope_amplitude(t, k);
    const double ep = ctx_.periodic_excitation(t, k);
    s1[k] = h * (ep * (1.0 - a[k]) + ctx_.aperiodic_excitation_1(t, k) * a[k]);
    s2[k] = h * (ep * (1.0 - a[k]) + ctx_.aperiodic_excitation_2(t, k) * a[k]);
    l1[k] = std::log(std::max(s1[k], floor));
    l2[k] = std::log(std::max(s2[k], floor));
  }
  lifter_.fine(l1, f1);
  lifter_.fine(l2, f2);

  const auto target = ctx_.target_fine.row(t);
  double attract = 0.0;
  double repel = 0.0;
  std::vector<double> g1(bins), g2(bins);
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  for (std::size_t k = 0; k < bins; ++k) {
    const double ra = f1[k] - target[k];
    const double rr = f1[k] - f2[k];
    attract += std::abs(ra);
    repel += std::abs(rr);
    g1[k] = sgn(ra) - ctx_.alpha * sgn(rr);
    g2[k] = ctx_.alpha * sgn(rr);
  }
  const double value = attract - ctx_.alpha * repel;
  if (grad.empty()) return value;

  std::vector<double> gl1(bins), gl2(bins);
  lifter_.fine_adjoint(g1, gl1);
  lifter_.fine_adjoint(g2, gl2);
  std::vector<double> d_log_b(bands, 0.0);
  for (std::size_t k = 0; k < bins; ++k) {
    const double h = ctx_.envelope_amplitude(t, k);
    const double ep = ctx_.periodic_excitation(t, k);
    double d_a = 0.0;
    if (s1[k] > floor) d_a += gl1[k] / s1[k] * h * (ctx_.aperiodic_excitation_1(t, k) - ep);
    if (s2[k] > floor) d_a += gl2[k] / s2[k] * h * (ctx_.aperiodic_excitation_2(t, k) - ep);
    const double d_log_a = d_a * a[k];
    const std::size_t i = ctx_.interp.lower[k];
    const double lam = ctx_.interp.lambda[k];
    d_log_b[i] += d_log_a * (1.0 - lam);
    if (lam > 0.0) d_log_b[i + 1] += d_log_a * lam;
  }
  for (std::size_t i = 0; i < bands; ++i) {
    const double raw = sigmoid(logits[i]);
    const bool clamped = raw < kBapMin || raw > kBapMax;
    grad[i] = clamped ? 0.0 : d_log_b[i] * (1.0 - b[i]);
  }
  return value;
}

double ReconObjective::loss(const Matrix& logits) const {
  double total = 0.0;
  for (std::size_t t = 0; t < frames(); ++t) {
    if (included(t)) total += frame_loss(t, logits.row(t));
  }
  return total * normalizer();
}

double ReconObjective::loss_and_grad(const Matrix& logits, Matrix& grad) const {
  grad = Matrix(logits.rows(), logits.cols());
  const double norm = normalizer();
  double total = 0.0;
  for (std::size_t t = 0; t < frames(); ++t) {
    if (!included(t)) continue;
    total += frame_loss(t, logits.row(t), grad.row(t));
    for (double& g : grad.row(t)) g *= norm;
  }
  return total * norm;
}

Matrix recon_loss_grad_bap(const BandAperiodicity& b, const ReconContext& context) {
  const ReconObjective objective(context);
  Matrix grad;
  objective.loss_and_grad(logits_from_bap(b), grad);
  return grad;
}

VoicingMask detect_voicing(const SpectralEnvelope& envelope, const Aperiodicity& a, double theta) {
  require_same_shape(envelope.log_values, a.values, "detect_voicing");
  const std::size_t frames = a.values.rows();
  VoicingMask v;
  v.flags.assign(frames, 0);
  v.soft_ratio.assign(frames, 0.0);
  v.degenerate.assign(frames, 0);
  for (std::size_t t = 0; t < frames; ++t) {
    double periodic = 0.0;
    double aperiodic = 0.0;
    for (std::size_t k = 0; k < a.values.cols(); ++k) {
      const double h = std::exp(envelope.log_values(t, k));
      periodic += h * (1.0 - a.values(t, k));
      aperiodic += h * a.values(t, k);
    }
    const double total = periodic + aperiodic;
    if (!(total > 0.0)) {
      v.degenerate[t] = 1;
      continue;
    }
    v.soft_ratio[t] = periodic / total;
    v.flags[t] = v.soft_ratio[t] >= theta ? 1 : 0;
  }
  return v;
}

}  // namespace pitchdsp
