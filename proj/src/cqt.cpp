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

#include "pitchdsp/cqt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pitchdsp/spectral.hpp"

namespace pitchdsp {

CqtAnalyzer::CqtAnalyzer(int sample_rate, CqtConfig config)
    : sample_rate_(sample_rate), config_(config) {
  if (sample_rate <= 0) throw std::invalid_argument("CqtAnalyzer: bad sample rate");
  if (config.bins <= 0 || config.bins_per_octave <= 0 || config.window_bins > config.bins) {
    throw std::invalid_argument("CqtAnalyzer: inconsistent bin layout");
  }
  if (bin_frequency(config.bins - 1) >= 0.5 * sample_rate) {
    throw std::invalid_argument("CqtAnalyzer: top bin above Nyquist");
  }
  const double q = config.filter_scale / (std::exp2(1.0 / config.bins_per_octave) - 1.0);
  kernels_.resize(static_cast<std::size_t>(config.bins));
  for (int j = 0; j < config.bins; ++j) {
    const double f = bin_frequency(j);
    const auto len = static_cast<std::size_t>(std::ceil(q * sample_rate / f));
    auto& k = kernels_[static_cast<std::size_t>(j)];
    k.cos.resize(len);
    k.sin.resize(len);
    double norm = 0.0;
    std::vector<double> win(len);
    for (std::size_t n = 0; n < len; ++n) {
      win[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (n + 0.5) / len);
      norm += win[n];
    }
    const double center = 0.5 * static_cast<double>(len);
    for (std::size_t n = 0; n < len; ++n) {
      const double phase = 2.0 * std::numbers::pi * f * (n - center) / sample_rate;
      k.cos[n] = win[n] * std::cos(phase) / norm;
      k.sin[n] = -win[n] * std::sin(phase) / norm;
    }
  }
}

double CqtAnalyzer::bin_frequency(int bin) const {
  return config_.f_min * std::exp2(static_cast<double>(bin) / config_.bins_per_octave);
}

CqtMatrix CqtAnalyzer::analyze(const Waveform& w) const {
  if (w.sample_rate != sample_rate_) {
    throw std::invalid_argument("cqt: waveform sample rate " + std::to_string(w.sample_rate) +
                                " does not match analyzer rate " + std::to_string(sample_rate_));
  }
  if (w.samples.size() < longest_kernel()) {
    throw std::invalid_argument("cqt: waveform has " + std::to_string(w.samples.size()) +
                                " samples, shorter than the longest kernel (" +
                                std::to_string(longest_kernel()) + ")");
  }
  const int hop = hop_samples(sample_rate_, config_.frame_shift_s);
  const std::size_t frames = frame_count(w.samples.size(), hop);
  CqtMatrix out;
  out.bins_per_octave = config_.bins_per_octave;
  out.f_min = config_.f_min;
  out.frame_shift_s = config_.frame_shift_s;
  out.magnitudes = Matrix(frames, kernels_.size());
  const auto len = static_cast<long long>(w.samples.size());
  for (std::size_t t = 0; t < frames; ++t) {
    const long long center = static_cast<long long>(t) * hop;
    for (std::size_t j = 0; j < kernels_.size(); ++j) {
      const auto& k = kernels_[j];
      const auto klen = static_cast<long long>(k.cos.size());
      const long long start = center - klen / 2;
      const long long lo = std::max(0LL, -start);
      const long long hi = std::min(klen, len - start);
      double re = 0.0;
      double im = 0.0;
      for (long long n = lo; n < hi; ++n) {
        const double x = w.samples[static_cast<std::size_t>(start + n)];
        re += x * k.cos[static_cast<std::size_t>(n)];
        im += x * k.sin[static_cast<std::size_t>(n)];
      }
      out.magnitudes(t, j) = std::hypot(re, im);
    }
  }
  return out;
}

CqtMatrix cqt_analyze(const Waveform& w, const CqtConfig& config) {
  return CqtAnalyzer(w.sample_rate, config).analyze(w);
}

CqtMatrix shift_scope(const CqtMatrix& c, int d_bins, const CqtConfig& config) {
  if (static_cast<int>(c.magnitudes.cols()) != config.bins) {
    throw std::invalid_argument("shift_scope: CQT has " + std::to_string(c.magnitudes.cols()) +
                                " bins, expected " + std::to_string(config.bins));
  }
  if (std::abs(d_bins) > config.max_shift()) {
    throw std::out_of_range("shift_scope: |d_bins| = " + std::to_string(std::abs(d_bins)) +
                            " exceeds " + std::to_string(config.max_shift()));
  }
  const auto start = static_cast<std::size_t>(config.window_start() + d_bins);
  const auto width = static_cast<std::size_t>(config.window_bins);
  CqtMatrix out = c;
  out.f_min = c.f_min * std::exp2(static_cast<double>(start) / c.bins_per_octave);
  out.magnitudes = Matrix(c.magnitudes.rows(), width);
  for (std::size_t t = 0; t < c.magnitudes.rows(); ++t) {
    for (std::size_t j = 0; j < width; ++j) out.magnitudes(t, j) = c.magnitudes(t, start + j);
  }
  return out;
}

Matrix log_compress(const Matrix& magnitudes, double gamma) {
  Matrix out(magnitudes.rows(), magnitudes.cols());
  for (std::size_t i = 0; i < magnitudes.data().size(); ++i) {
    out.data()[i] = std::log1p(magnitudes.data()[i] / gamma);
  }
  return out;
}

}  // namespace pitchdsp
