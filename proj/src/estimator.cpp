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

#include "pitchdsp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pitchdsp/synth.hpp"

namespace pitchdsp {

void EstimatorConfig::validate() const {
  if (steps <= 0) throw std::invalid_argument("steps must be positive");
  if (!(lr_log2f0 >= 0.0) || !(lr_bap_logit >= 0.0)) {
    throw std::invalid_argument("learning rates must be non-negative");
  }
  if (!(lr_final_ratio >= 0.0 && lr_final_ratio <= 1.0)) {
    throw std::invalid_argument("lr_final_ratio must lie in [0, 1]");
  }
  if (!(weights.pseudo >= 0.0 && weights.guide >= 0.0 && weights.recon >= 0.0 &&
        weights.tv >= 0.0)) {
    throw std::invalid_argument("loss weights must be non-negative");
  }
  if (!(theta >= 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [0, 1]");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  if (!(fallback_f0_hz >= kMinF0Hz && fallback_f0_hz <= kMaxF0Hz)) {
    throw std::invalid_argument("fallback_f0_hz outside [20, 2000]");
  }
  if (median_width < 1 || median_width % 2 == 0) {
    throw std::invalid_argument("median_width must be a positive odd number");
  }
  if (spectral.fft_size < 16 || spectral.fft_size % 2 != 0) {
    throw std::invalid_argument("fft_size must be even and at least 16");
  }
  if (!(spectral.frame_shift_s > 0.0)) throw std::invalid_argument("frame shift must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct StepSeeds {
  std::uint64_t pseudo_noise;
  std::uint64_t pseudo_aperiodic;
  std::uint64_t recon_1;
  std::uint64_t recon_2;
};

StepSeeds step_seeds(std::uint64_t seed, std::uint64_t step) {
  std::uint64_t state = seed;
  state = splitmix64(state) ^ step;
  return {splitmix64(state), splitmix64(state), splitmix64(state), splitmix64(state)};
}

class Adam {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  void step(std::span<double> x, std::span<const double> g, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < x.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g[i] * g[i];
      x[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEpsilon);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;
  std::vector<double> m_;
  std::vector<double> v_;
  int t_ = 0;
};

double scheduled_lr(double lr, double final_ratio, int step, int steps) {
  if (steps <= 1) return lr;
  const double progress = static_cast<double>(step) / (steps - 1);
  return lr * (final_ratio + (1.0 - final_ratio) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
}

// Fills frames flagged in `missing` from the others: linear in value inside
// gaps, constant at the edges.
void fill_gaps(std::vector<double>& x, const std::vector<bool>& missing) {
  const std::size_t n = x.size();
  std::size_t prev = n;
  for (std::size_t t = 0; t < n; ++t) {
    if (missing[t]) continue;
    if (prev == n) {
      for (std::size_t j = 0; j < t; ++j) x[j] = x[t];
    } else {
      for (std::size_t j = prev + 1; j < t; ++j) {
        const double frac = static_cast<double>(j - prev) / static_cast<double>(t - prev);
        x[j] = (1.0 - frac) * x[prev] + frac * x[t];
      }
    }
    prev = t;
  }
  for (std::size_t j = prev + 1; j < n; ++j) x[j] = x[prev];
}

std::vector<bool> silent_frames(const AmplitudeSpectrogram& s, const PitchGuide& g,
                                double amplitude_floor) {
  std::vector<bool> silent(s.frames(), false);
  for (std::size_t t = 0; t < s.frames(); ++t) {
    const auto row = s.values.row(t);
    silent[t] = (t < g.silent.size() && g.silent[t]) ||
                std::all_of(row.begin(), row.end(), [&](double v) { return v <= amplitude_floor; });
  }
  return silent;
}

Matrix scaled_aperiodic_spec(const Matrix& excitation, const Matrix& h, const Matrix& a) {
  Matrix out(excitation.rows(), excitation.cols());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = excitation.data()[i] * h.data()[i] * a.data()[i];
  }
  return out;
}

VoicingMask voicing_with_silence(const SpectralEnvelope& env, const Aperiodicity& a, double theta,
                                 const std::vector<bool>& silent) {
  VoicingMask v = detect_voicing(env, a, theta);
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (silent[t]) v.flags[t] = 0;
  }
  return v;
}

}  // namespace

InitialState initialize(const AmplitudeSpectrogram& s, const PitchGuide& g, int median_width) {
  if (g.values.rows() != s.frames()) {
    throw std::invalid_argument("initialize: guide and spectrogram frame counts differ");
  }
  const std::size_t frames = s.frames();
  std::vector<bool> missing(frames, true);
  std::vector<double> peak(frames, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    if (t < g.silent.size() && g.silent[t]) continue;
    const auto row = g.values.row(t);
    const auto it = std::max_element(row.begin(), row.end());
    peak[t] = std::log2(g.freq_axis[static_cast<std::size_t>(it - row.begin())]);
    missing[t] = false;
  }
  if (std::all_of(missing.begin(), missing.end(), [](bool b) { return b; })) {
    throw EstimatorError("no harmonic content: every frame is silent");
  }

  const auto half = static_cast<long long>(median_width / 2);
  std::vector<double> log2_f0(frames, 0.0);
  std::vector<double> window;
  for (std::size_t t = 0; t < frames; ++t) {
    if (missing[t]) continue;
    window.clear();
    for (long long j = static_cast<long long>(t) - half; j <= static_cast<long long>(t) + half; ++j) {
      if (j < 0 || j >= static_cast<long long>(frames) || missing[static_cast<std::size_t>(j)]) {
        continue;
      }
      window.push_back(peak[static_cast<std::size_t>(j)]);
    }
    const auto mid = window.begin() + static_cast<long long>(window.size() / 2);
    std::nth_element(window.begin(), mid, window.end());
    log2_f0[t] = *mid;
  }
  fill_gaps(log2_f0, missing);

  InitialState init;
  init.pitch = PitchTrack::from_log2(log2_f0);
  init.pitch.clamp();
  init.bap.values = Matrix(frames, kBapBands, 0.5);
  return init;
}

EstimationResult estimate(const Waveform& w, const EstimatorConfig& config) {
  config.validate();
  validate(w);
  if (w.sample_rate != kInternalSampleRate) {
    throw std::invalid_argument("estimate: waveform must be at the internal sample rate");
  }
  if (w.samples.empty()) throw EstimatorError("estimate: empty waveform");

  const auto& sc = config.spectral;
  EstimationResult r;
  r.num_samples = w.samples.size();
  r.spectrogram = stft_amplitude(w, sc.fft_size, sc.frame_shift_s);
  const auto& s = r.spectrogram;
  const std::size_t frames = s.frames();
  const std::size_t bins = s.bins();
  r.envelope = lag_window_envelope(s, sc.lifter_cutoff_s, sc.amplitude_floor);
  r.guide = build_pitch_guide(s, sc, config.guide);
  const auto silent = silent_frames(s, r.guide, sc.amplitude_floor);
  if (std::all_of(silent.begin(), silent.end(), [](bool b) { return b; })) {
    throw EstimatorError("no harmonic content: every frame is silent");
  }

  const LagWindowLifter lifter(bins, s.sample_rate, sc.lifter_cutoff_s);
  const Matrix target_fine = lifter.fine(log_floored(s.values, sc.amplitude_floor));
  Matrix h = r.envelope.log_values;
  for (double& v : h.data()) v = std::exp(v);
  const int hop = hop_samples(s.sample_rate, sc.frame_shift_s);
  const auto interp =
      make_band_interpolation(bins, s.sample_rate, sc.fft_size, default_bap_anchors_hz());

  InitialState init = initialize(s, r.guide, config.median_width);
  if (config.weights.guide == 0.0) {
    init.pitch = PitchTrack(frames, config.fallback_f0_hz);
  }
  std::vector<double> log2_p = init.pitch.log2_f0();
  Matrix logits = logits_from_bap(init.bap);

  std::vector<std::uint8_t> recon_mask(frames);
  std::size_t non_silent = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    recon_mask[t] = silent[t] ? 0 : 1;
    non_silent += silent[t] ? 0 : 1;
  }

  Adam pitch_opt(frames);
  Adam bap_opt(logits.data().size());
  const double lo = std::log2(kMinF0Hz);
  const double hi = std::log2(kMaxF0Hz);
  const auto& wt = config.weights;
  std::vector<double> grad_p(frames), total_grad(frames);
  Matrix grad_u;
  r.loss_trace.reserve(static_cast<std::size_t>(config.steps));

  for (int step = 0; step < config.steps; ++step) {
    const StepSeeds seeds = step_seeds(config.seed, static_cast<std::uint64_t>(step));
    const PitchTrack p = PitchTrack::from_log2(log2_p);
    const Aperiodicity a = bap_to_aperiodicity(bap_from_logits(logits), interp);
    const VoicingMask v = voicing_with_silence(r.envelope, a, config.theta, silent);
    LossBreakdown lb;
    std::fill(total_grad.begin(), total_grad.end(), 0.0);

    if (wt.pseudo > 0.0) {
      PseudoContext pc;
      pc.target_fine = target_fine;
      pc.envelope_amplitude = h;
      pc.aperiodicity = a.values;
      const Matrix e_ap = excitation_spectrogram(
          aperiodic_excitation(r.num_samples, seeds.pseudo_aperiodic, s.sample_rate),
          sc.fft_size, sc.frame_shift_s);
      pc.aperiodic_spec = scaled_aperiodic_spec(e_ap, h, a.values);
      pc.voiced = v.flags;
      pc.eps = config.eps;
      pc.noise_seed = seeds.pseudo_noise;
      pc.sample_rate = s.sample_rate;
      pc.fft_size = sc.fft_size;
      pc.amplitude_floor = sc.amplitude_floor;
      pc.lifter_cutoff_s = sc.lifter_cutoff_s;
      const PseudoObjective objective(std::move(pc));
      lb.pseudo = objective.loss_and_grad(p, grad_p);
      for (std::size_t t = 0; t < frames; ++t) total_grad[t] += wt.pseudo * grad_p[t];
    }

    if (wt.guide > 0.0 && non_silent > 0) {
      const double inv = 1.0 / static_cast<double>(non_silent);
      for (std::size_t t = 0; t < frames; ++t) {
        if (silent[t]) continue;
        const GuideSample g = guide_value_at(r.guide, t, p.hz(t));
        const double hinge = 1.0 - g.value - config.m;
        if (hinge <= 0.0) continue;
        lb.guide += hinge * inv;
        total_grad[t] -= wt.guide * g.slope * inv;
      }
    }

    if (wt.tv > 0.0 && frames > 1) {
      const double inv = 1.0 / static_cast<double>(frames - 1);
      for (std::size_t t = 0; t + 1 < frames; ++t) {
        const double d = log2_p[t + 1] - log2_p[t];
        lb.tv += std::abs(d) * inv;
        const double sg = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        total_grad[t + 1] += wt.tv * sg * inv;
        total_grad[t] -= wt.tv * sg * inv;
      }
    }

    if (wt.recon > 0.0) {
      ReconContext rc;
      rc.target_fine = target_fine;
      rc.envelope_amplitude = h;
      rc.periodic_excitation = excitation_spectrogram(
          harmonic_excitation(p, s.sample_rate, hop, r.num_samples), sc.fft_size,
          sc.frame_shift_s);
      rc.aperiodic_excitation_1 = excitation_spectrogram(
          aperiodic_excitation(r.num_samples, seeds.recon_1, s.sample_rate), sc.fft_size,
          sc.frame_shift_s);
      rc.aperiodic_excitation_2 = excitation_spectrogram(
          aperiodic_excitation(r.num_samples, seeds.recon_2, s.sample_rate), sc.fft_size,
          sc.frame_shift_s);
      rc.interp = interp;
      rc.frame_mask = recon_mask;
      rc.alpha = config.alpha;
      rc.amplitude_floor = sc.amplitude_floor;
      rc.lifter_cutoff_s = sc.lifter_cutoff_s;
      rc.sample_rate = s.sample_rate;
      const ReconObjective objective(std::move(rc));
      lb.recon = objective.loss_and_grad(logits, grad_u);
      for (double& g : grad_u.data()) g *= wt.recon;
      bap_opt.step(logits.data(), grad_u.data(),
                   scheduled_lr(config.lr_bap_logit, config.lr_final_ratio, step, config.steps));
    }

    lb.total = wt.pseudo * lb.pseudo + wt.guide * lb.guide + wt.recon * lb.recon + wt.tv * lb.tv;
    r.loss_trace.push_back(lb);

    pitch_opt.step(log2_p, total_grad,
                   scheduled_lr(config.lr_log2f0, config.lr_final_ratio, step, config.steps));
    for (double& x : log2_p) x = std::clamp(x, lo, hi);
  }

  r.pitch = PitchTrack::from_log2(log2_p);
  r.bap = bap_from_logits(logits);
  for (std::size_t t = 0; t < frames; ++t) {
    if (!silent[t]) continue;
    for (double& b : r.bap.values.row(t)) b = kBapMax;
  }
  r.aperiodicity = bap_to_aperiodicity(r.bap, interp);
  r.voicing = voicing_with_silence(r.envelope, r.aperiodicity, config.theta, silent);
  return r;
}

VocoderFeatureSet to_feature_set(const EstimationResult& r) {
  VocoderFeatureSet f;
  f.pitch = r.pitch;
  f.envelope = r.envelope;
  f.bap = r.bap;
  f.aperiodicity = r.aperiodicity;
  f.voicing = r.voicing;
  f.frame_shift_s = r.spectrogram.frame_shift_s;
  f.sample_rate = r.spectrogram.sample_rate;
  f.fft_size = r.spectrogram.fft_size;
  f.num_samples = r.num_samples;
  return f;
}

VocoderFeatureSet analyze_features(const Waveform& w, const EstimatorConfig& config) {
  if (w.sample_rate == kInternalSampleRate) return to_feature_set(estimate(w, config));
  return to_feature_set(estimate(resample(w, kInternalSampleRate), config));
}

std::vector<double> smoothed_total_loss(const std::vector<LossBreakdown>& trace, int window) {
  if (window < 1) throw std::invalid_argument("smoothed_total_loss: window must be positive");
  std::vector<double> out(trace.size());
  double running = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    running += trace[i].total;
    if (i >= static_cast<std::size_t>(window)) running -= trace[i - window].total;
    out[i] = running / static_cast<double>(std::min<std::size_t>(i + 1, window));
  }
  return out;
}

PseudoObjective final_pseudo_objective(const EstimationResult& r, const EstimatorConfig& config,
                                       std::uint64_t seed) {
  const auto& sc = config.spectral;
  const auto& s = r.spectrogram;
  const LagWindowLifter lifter(s.bins(), s.sample_rate, sc.lifter_cutoff_s);
  Matrix h = r.envelope.log_values;
  for (double& v : h.data()) v = std::exp(v);
  std::uint64_t state = seed;
  PseudoContext pc;
  pc.target_fine = lifter.fine(log_floored(s.values, sc.amplitude_floor));
  pc.envelope_amplitude = h;
  pc.aperiodicity = r.aperiodicity.values;
  const Matrix e_ap = excitation_spectrogram(
      aperiodic_excitation(r.num_samples, splitmix64(state), s.sample_rate), s.fft_size,
      s.frame_shift_s);
  pc.aperiodic_spec = scaled_aperiodic_spec(e_ap, h, r.aperiodicity.values);
  pc.voiced = r.voicing.flags;
  pc.eps = config.eps;
  pc.noise_seed = splitmix64(state);
  pc.sample_rate = s.sample_rate;
  pc.fft_size = s.fft_size;
  pc.amplitude_floor = sc.amplitude_floor;
  pc.lifter_cutoff_s = sc.lifter_cutoff_s;
  return PseudoObjective(std::move(pc));
}

}  // namespace pitchdsp
