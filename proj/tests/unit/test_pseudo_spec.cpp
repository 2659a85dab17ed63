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

#include "helpers.hpp"
#include "pitchdsp/fixtures.hpp"
#include "pitchdsp/pseudo_spec.hpp"

using namespace pitchdsp;

namespace {

struct Scene {
  AmplitudeSpectrogram s;
  PseudoContext ctx;
};

Scene vowel_scene(double f0, double seconds = 0.3, std::uint64_t seed = 5) {
  VowelOptions opts;
  opts.duration_s = seconds;
  Scene sc;
  sc.s = stft_amplitude(make_flat_vowel(f0, opts).waveform);
  const auto env = lag_window_envelope(sc.s);
  auto& c = sc.ctx;
  c.target_fine = fine_structure(sc.s).values;
  c.envelope_amplitude = env.log_values;
  for (double& v : c.envelope_amplitude.data()) v = std::exp(v);
  c.aperiodicity = Matrix(sc.s.frames(), sc.s.bins(), 0.01);
  c.aperiodic_spec = Matrix(sc.s.frames(), sc.s.bins(), 0.0);
  c.voiced.assign(sc.s.frames(), 1);
  // Fade-in/out frames are excluded; they hold little of the comb.
  for (std::size_t t = 0; t < 3; ++t) c.voiced[t] = c.voiced[sc.s.frames() - 1 - t] = 0;
  c.noise_seed = seed;
  return sc;
}

double voiced_fraction_within(const PseudoObjective& obj, double f0, double step,
                                           double tol) {
  std::size_t ok = 0, used = 0;
  for (std::size_t t = 0; t < obj.frames(); ++t) {
    if (!obj.context().voiced[t]) continue;
    const double x = std::log2(f0) + 0.003 * std::sin(double(t));
    double g = 0.0;
    obj.frame_residual_l1(t, x, &g);
    const double fd = (obj.frame_residual_l1(t, x + step) - obj.frame_residual_l1(t, x - step)) /
                      (2.0 * step);
    ++used;
    if (std::abs(g - fd) <= tol * std::max(std::abs(fd), 1e-12)) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(used);
}

}  // namespace

TEST_CASE("phase matrix") {
  const auto phi = phase_matrix(PitchTrack(2, 11.71875), 24000, 1024);
  REQUIRE(phi.cols() == 1025);
  for (std::size_t k = 0; k < 1025; ++k) CHECK(phi(1, k) == doctest::Approx(double(k)));
  const auto phi200 = phase_matrix(PitchTrack(1, 200.0), 24000, 1024);
  CHECK(phi200(0, 1024) == doctest::Approx(60.0));
  // Harmonic n sits at bin n * p * 2K / fs.
  const double k3 = 3 * 200.0 * 2048 / 24000.0;
  CHECK(k3 * 24000.0 / (2 * 200.0 * 1024) == doctest::Approx(3.0));
  PitchTrack bad(1, 100.0);
  bad.set_hz(0, 0.0);
  CHECK_THROWS(phase_matrix(bad, 24000, 1024));
}

TEST_CASE("triangle wave values") {
  CHECK(triangle_value(0.25) == -1.0);
  CHECK(triangle_value(1.0) == 1.0);
  CHECK(triangle_value(1.5) == -1.0);
  CHECK(triangle_value(2.25) == 0.0);
  Matrix phi(1, 3);
  phi(0, 0) = 0.1;
  phi(0, 1) = 3.0;
  phi(0, 2) = 3.75;
  const auto x = triangle_wave(phi);
  CHECK(x(0, 0) == -1.0);
  CHECK(x(0, 1) == 1.0);
  CHECK(x(0, 2) == 0.0);
}

TEST_CASE("excitation peak and floor values") {
  Matrix phi(1, 2);
  phi(0, 0) = 4.0;
  phi(0, 1) = 4.5;
  Matrix z(1, 2);
  z(0, 0) = -0.7;
  z(0, 1) = 1.3;
  const auto e = pseudo_periodic_excitation(phi, z, 1e-3);
  CHECK(e(0, 0) == doctest::Approx(1.0 + 0.7e-3));
  CHECK(e(0, 1) == doctest::Approx(1e-6 + 1.3e-3));
}

TEST_CASE("noise term mean is eps * sqrt(2/pi)") {
  const Matrix z = standard_normal_matrix(1000, 1000, 17);
  double mean = 0.0;
  for (double v : z.data()) mean += std::abs(v * 1e-3);
  mean /= static_cast<double>(z.data().size());
  CHECK(mean == doctest::Approx(1e-3 * std::sqrt(2.0 / std::numbers::pi)).epsilon(3e-3));
}

TEST_CASE("excitation is periodic in phase and reproducible") {
  const auto a = pseudo_periodic_excitation(PitchTrack(3, 173.0), 24000, 1024, 1e-3, 8);
  const auto b = pseudo_periodic_excitation(PitchTrack(3, 173.0), 24000, 1024, 1e-3, 8);
  CHECK(a == b);
  const auto c = pseudo_periodic_excitation(PitchTrack(3, 173.0), 24000, 1024, 1e-3, 9);
  CHECK_FALSE(a == c);
  // Same fractional phase, same max-term.
  Matrix phi(1, 2), zero(1, 2);
  phi(0, 0) = 1.3;
  phi(0, 1) = 7.3;
  const auto e = pseudo_periodic_excitation(phi, zero, 1e-3);
  CHECK(e(0, 0) == doctest::Approx(e(0, 1)).epsilon(1e-12));
}

TEST_CASE("assembly") {
  const std::size_t n = 4;
  Matrix e(1, n), ap(1, n);
  for (std::size_t k = 0; k < n; ++k) {
    e(0, k) = 1.0 + k;
    ap(0, k) = 0.1 * k;
  }
  SpectralEnvelope h{Matrix(1, n, std::log(2.0))};
  SUBCASE("fully periodic") {
    const auto s = assemble_pseudo_spectrogram(e, h, Aperiodicity{Matrix(1, n, 0.0)}, Matrix(1, n));
    for (std::size_t k = 0; k < n; ++k) CHECK(s(0, k) == doctest::Approx(2.0 * e(0, k)));
  }
  SUBCASE("fully aperiodic: only the aperiodic branch remains") {
    const auto s = assemble_pseudo_spectrogram(e, h, Aperiodicity{Matrix(1, n, 1.0)}, ap);
    for (std::size_t k = 0; k < n; ++k) CHECK(s(0, k) == doctest::Approx(ap(0, k)));
  }
  SUBCASE("equal mix with flat envelope") {
    SpectralEnvelope flat{Matrix(1, n, 0.0)};
    Matrix half_ap = ap;
    for (double& v : half_ap.data()) v *= 0.5;  // F(e_ap) . H . A with A = 0.5
    const auto s = assemble_pseudo_spectrogram(e, flat, Aperiodicity{Matrix(1, n, 0.5)}, half_ap);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(s(0, k) == doctest::Approx(0.5 * e(0, k) + 0.5 * ap(0, k)));
    }
  }
  CHECK_THROWS(assemble_pseudo_spectrogram(e, SpectralEnvelope{Matrix(1, 3)},
                                           Aperiodicity{Matrix(1, n)}, ap));
}

TEST_CASE("masked loss") {
  const auto sc = vowel_scene(200.0, 0.1);
  const LagWindowLifter lifter(1025, 24000, 0.0018);
  VoicingMask all{std::vector<std::uint8_t>(sc.s.frames(), 1), {}, {}};
  VoicingMask none{std::vector<std::uint8_t>(sc.s.frames(), 0), {}, {}};
  CHECK(pseudo_loss(sc.s.values, sc.s.values, all, lifter).value == 0.0);
  Matrix other = sc.s.values;
  for (double& v : other.data()) v = v * 1.5 + 0.01;
  const auto masked = pseudo_loss(other, sc.s.values, none, lifter);
  CHECK(masked.value == 0.0);
  CHECK(masked.no_voiced_frames);
  CHECK(pseudo_loss(other, sc.s.values, all, lifter).value > 0.0);
}

TEST_CASE("objective agrees with the standalone loss") {
  const auto sc = vowel_scene(200.0, 0.1);
  const PseudoObjective obj(sc.ctx);
  const PitchTrack p(sc.s.frames(), 201.0);
  Matrix s_star(sc.s.frames(), sc.s.bins());
  for (std::size_t t = 0; t < sc.s.frames(); ++t) {
    const auto row = obj.frame_pseudo_spectrum(t, p.log2_hz(t));
    std::copy(row.begin(), row.end(), s_star.row(t).begin());
  }
  VoicingMask v{sc.ctx.voiced, {}, {}};
  const LagWindowLifter lifter(1025, 24000, 0.0018);
  CHECK(obj.loss(p) == doctest::Approx(pseudo_loss(s_star, sc.s.values, v, lifter).value).epsilon(1e-10));
}

TEST_CASE("loss is lowest at the true F0") {
  for (double f0 : {100.0, 200.0, 400.0}) {
    CAPTURE(f0);
    const auto sc = vowel_scene(f0);
    const PseudoObjective obj(sc.ctx);
    const std::size_t frames = sc.s.frames();
    const double at = obj.loss(PitchTrack(frames, f0));
    CHECK(at < obj.loss(PitchTrack(frames, f0 * std::exp2(30.0 / 1200.0))));
    CHECK(at < obj.loss(PitchTrack(frames, f0 * std::exp2(-30.0 / 1200.0))));
  }
}

TEST_CASE("gradient points back toward the truth from +10 cents") {
  for (double f0 : {100.0, 200.0, 400.0}) {
    CAPTURE(f0);
    const auto sc = vowel_scene(f0);
    const PseudoObjective obj(sc.ctx);
    std::vector<double> grad;
    obj.loss_and_grad(PitchTrack(sc.s.frames(), f0 * std::exp2(10.0 / 1200.0)), grad);
    double mean = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < grad.size(); ++t) {
      if (!sc.ctx.voiced[t]) continue;
      mean += grad[t];
      ++n;
    }
    CHECK(mean / n > 0.0);
  }
}

TEST_CASE("gradient structure") {
  auto sc = vowel_scene(200.0, 0.1);
  sc.ctx.voiced[5] = 0;
  const PseudoObjective obj(sc.ctx);
  PitchTrack p(sc.s.frames(), 203.0);
  std::vector<double> g1, g2;
  obj.loss_and_grad(p, g1);
  CHECK(g1[5] == 0.0);
  // Moving other frames leaves frame 10's gradient unchanged.
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (t != 10) p.set_hz(t, 150.0 + t);
  }
  obj.loss_and_grad(p, g2);
  CHECK(g1[10] == g2[10]);
}

TEST_CASE("analytic gradient matches small-step central differences") {
  // The loss is piecewise smooth with many kinks per frame (triangle peaks,
  // the eps floor, L1 sign changes); steps must be small enough not to cross
  // them for central differences to approximate the derivative.
  const auto sc = vowel_scene(200.0);
  const PseudoObjective obj(sc.ctx);
  CHECK(voiced_fraction_within(obj, 200.0, 1e-8, 1e-3) >= 0.95);
}
