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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "helpers.hpp"
#include "pitchdsp/fft.hpp"
#include "pitchdsp/spectral.hpp"

using namespace pitchdsp;

namespace {

AmplitudeSpectrogram constant_spectrogram(double c, std::size_t frames = 3) {
  AmplitudeSpectrogram s;
  s.values = Matrix(frames, 1025, c);
  return s;
}

// Direct cosine-series evaluation of the lifter, independent of FFTW:
// cepstrum by the DCT-I sum, window, then back.
std::vector<double> naive_envelope(const std::vector<double>& x, const std::vector<double>& lag) {
  const std::size_t n = x.size();
  const std::size_t k = n - 1;
  auto dct1 = [&](const std::vector<double>& in) {
    std::vector<double> out(n);
    for (std::size_t q = 0; q < n; ++q) {
      double acc = in[0] + ((q % 2) ? -in[k] : in[k]);
      for (std::size_t j = 1; j < k; ++j) {
        acc += 2.0 * in[j] * std::cos(std::numbers::pi * double(q * j) / double(k));
      }
      out[q] = acc;
    }
    return out;
  };
  auto cep = dct1(x);
  for (std::size_t q = 0; q < n; ++q) cep[q] *= lag[q];
  auto env = dct1(cep);
  for (double& v : env) v /= 2.0 * static_cast<double>(k);
  return env;
}

}  // namespace

TEST_CASE("frame count and hop") {
  CHECK(hop_samples(24000, 0.005) == 120);
  CHECK(frame_count(24000, 120) == 201);
  CHECK(frame_count(119, 120) == 1);
  CHECK_THROWS(hop_samples(24000, 0.0));
}

TEST_CASE("zero signal gives an all-zero spectrogram") {
  Waveform w;
  w.samples.assign(4800, 0.0);
  const auto s = stft_amplitude(w);
  CHECK(s.frames() == 41);
  CHECK(s.bins() == 1025);
  for (double v : s.values.data()) CHECK(v == 0.0);
  CHECK_THROWS(stft_amplitude(Waveform{}));
  CHECK_THROWS(stft_amplitude(w, 1000));
}

TEST_CASE("impulse at a frame center with a rectangular window is flat") {
  Waveform w;
  w.samples.assign(2400, 0.0);
  w.samples[1200] = 1.0;
  const auto s = stft_amplitude(w, 2048, 0.005, WindowType::kRectangular);
  for (double v : s.values.row(10)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("500 Hz sine peaks at bin 43, matching a naive DFT of the same frame") {
  const Waveform w = testing::sine(500.0, 0.5);
  const auto s = stft_amplitude(w);
  const std::size_t t = 50;
  std::vector<double> row(s.values.row(t).begin(), s.values.row(t).end());
  CHECK(testing::argmax(row) == 43);

  const auto window = make_window(WindowType::kHann, 2048);
  std::vector<double> frame(2048);
  for (std::size_t i = 0; i < 2048; ++i) frame[i] = w.samples[t * 120 - 1024 + i] * window[i];
  const auto ref = testing::naive_dft_magnitude(frame);
  for (std::size_t k = 30; k < 60; ++k) CHECK(row[k] == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("lifter matches a direct cosine-series evaluation") {
  const LagWindowLifter lifter(1025, 24000, 0.0018);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<double> x(1025);
  for (double& v : x) v = nd(rng);
  std::vector<double> env(1025);
  lifter.envelope(x, env);
  const auto ref = naive_envelope(x, lifter.lag_window());
  for (std::size_t k = 0; k < 1025; ++k) CHECK(env[k] == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("lag window shape") {
  const LagWindowLifter lifter(1025, 24000, 0.0018);
  const auto& w = lifter.lag_window();
  // Cutoff 43.2 samples of quefrency; flat below 21.6.
  CHECK(w[0] == 1.0);
  CHECK(w[21] == 1.0);
  CHECK(w[22] < 1.0);
  CHECK(w[43] > 0.0);
  CHECK(w[44] == 0.0);
}

TEST_CASE("constant spectrogram: envelope is log c and fine structure vanishes") {
  const auto s = constant_spectrogram(0.37);
  const auto env = lag_window_envelope(s);
  const auto fine = fine_structure(s);
  for (double v : env.log_values.data()) CHECK(v == doctest::Approx(std::log(0.37)).epsilon(1e-12));
  for (double v : fine.values.data()) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("slow cosine ripple passes through the envelope") {
  AmplitudeSpectrogram s;
  s.values = Matrix(1, 1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    s.values(0, k) = std::exp(std::cos(2.0 * std::numbers::pi * 3.0 * k / 2048.0));
  }
  const auto env = lag_window_envelope(s);
  for (std::size_t k = 0; k < 1025; ++k) {
    CHECK(std::abs(env.log_values(0, k) - std::log(s.values(0, k))) < 1e-6);
  }
}

TEST_CASE("comb ripple at 5 ms quefrency is rejected by the envelope") {
  // 200 Hz comb: period 2048*200/24000 = 17.07 bins, i.e. quefrency 120 samples.
  AmplitudeSpectrogram s;
  s.values = Matrix(1, 1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    s.values(0, k) = std::exp(std::cos(2.0 * std::numbers::pi * k * 11.71875 / 200.0));
  }
  const auto env = lag_window_envelope(s);
  double peak = 0.0;
  for (std::size_t k = 50; k < 975; ++k) peak = std::max(peak, std::abs(env.log_values(0, k)));
  CHECK(peak < 0.05);
}

TEST_CASE("fine structure of envelope times comb recovers the comb") {
  AmplitudeSpectrogram s;
  s.values = Matrix(1, 1025);
  std::vector<double> comb(1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    comb[k] = 0.8 * std::cos(2.0 * std::numbers::pi * k * 11.71875 / 200.0);
    const double env = -0.002 * k + 0.5 * std::cos(2.0 * std::numbers::pi * 2.0 * k / 2048.0);
    s.values(0, k) = std::exp(env + comb[k]);
  }
  const auto fine = fine_structure(s);
  double err = 0.0;
  for (std::size_t k = 50; k < 975; ++k) err = std::max(err, std::abs(fine.values(0, k) - comb[k]));
  CHECK(err < 0.05);
}

TEST_CASE("decomposition, idempotence and linearity") {
  const Waveform w = testing::sine(180.0, 0.2);
  const auto s = stft_amplitude(w);
  const auto env = lag_window_envelope(s);
  const auto fine = fine_structure(s);
  const Matrix logs = log_floored(s.values, 1e-5);
  for (std::size_t i = 0; i < logs.data().size(); ++i) {
    CHECK(fine.values.data()[i] + env.log_values.data()[i] == doctest::Approx(logs.data()[i]).epsilon(1e-12));
  }

  // The taper is not a projection; idempotence holds for envelopes whose
  // cepstrum lies in the flat part of the lag window.
  const LagWindowLifter lifter(1025, 24000, 0.0018);
  std::vector<double> smooth(1025), once(1025), twice(1025);
  for (std::size_t k = 0; k < 1025; ++k) smooth[k] = std::cos(2.0 * std::numbers::pi * 5.0 * k / 2048.0);
  lifter.envelope(smooth, once);
  lifter.envelope(once, twice);
  for (std::size_t k = 0; k < 1025; ++k) CHECK(std::abs(twice[k] - once[k]) < 1e-6);

  // psi applied twice: exact when the smooth part sits in the flat passband
  // and the ripple lies beyond the cutoff (exact DCT-I basis functions).
  AmplitudeSpectrogram f;
  f.values = Matrix(1, 1025);
  std::vector<double> ripple(1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    ripple[k] = 0.7 * std::cos(std::numbers::pi * 120.0 * k / 1024.0);
    f.values(0, k) = std::exp(0.4 * std::cos(std::numbers::pi * 9.0 * k / 1024.0) + ripple[k]);
  }
  const auto psi1 = fine_structure(f);
  AmplitudeSpectrogram g = f;
  for (std::size_t k = 0; k < 1025; ++k) g.values(0, k) = std::exp(psi1.values(0, k));
  const auto psi2 = fine_structure(g);
  for (std::size_t k = 0; k < 1025; ++k) {
    CHECK(std::abs(psi1.values(0, k) - ripple[k]) < 1e-9);
    CHECK(std::abs(psi2.values(0, k) - psi1.values(0, k)) < 1e-3);
  }

  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::vector<double> x(1025), y(1025), xy(1025), fx(1025), fy(1025), fxy(1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    x[k] = nd(rng);
    y[k] = nd(rng);
    xy[k] = x[k] + y[k];
  }
  lifter.fine(x, fx);
  lifter.fine(y, fy);
  lifter.fine(xy, fxy);
  for (std::size_t k = 0; k < 1025; ++k) CHECK(std::abs(fxy[k] - fx[k] - fy[k]) < 1e-9);
}

TEST_CASE("fine_adjoint is the transpose of fine") {
  const LagWindowLifter lifter(1025, 24000, 0.0018);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<double> x(1025), g(1025), fx(1025), atg(1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    x[k] = nd(rng);
    g[k] = nd(rng);
  }
  lifter.fine(x, fx);
  lifter.fine_adjoint(g, atg);
  const double lhs = std::inner_product(g.begin(), g.end(), fx.begin(), 0.0);
  const double rhs = std::inner_product(atg.begin(), atg.end(), x.begin(), 0.0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("minimum phase response") {
  std::vector<double> flat(1025, 0.0);
  std::vector<std::complex<double>> spec(1025);
  minimum_phase_spectrum(flat, spec);
  for (const auto& z : spec) CHECK(std::abs(std::arg(z)) < 1e-12);

  // Single resonance at 1 kHz, 100 Hz wide, on a low floor.
  std::vector<double> res(1025);
  for (std::size_t k = 0; k < 1025; ++k) {
    const double f = k * 11.71875;
    res[k] = std::log(0.05 + 1.0 / (1.0 + std::pow((f - 1000.0) / 50.0, 2)));
  }
  Matrix m(1, 1025);
  std::copy(res.begin(), res.end(), m.row(0).begin());
  const auto resp = minimum_phase_response(m);
  for (std::size_t k = 0; k < 1025; ++k) {
    CHECK(std::abs(resp[0][k]) == doctest::Approx(std::exp(res[k])).epsilon(1e-9));
  }
  const auto h = minimum_phase_impulse(res);
  double head = 0.0, total = 0.0;
  for (std::size_t n = 0; n < h.size(); ++n) {
    total += h[n] * h[n];
    if (n < h.size() / 4) head += h[n] * h[n];
  }
  CHECK(head / total >= 0.9);
}
