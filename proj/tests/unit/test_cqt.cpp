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
#include "pitchdsp/cqt.hpp"

using namespace pitchdsp;

namespace {

std::vector<double> mean_row(const Matrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t t = m.rows() / 4; t < 3 * m.rows() / 4; ++t) {
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += m(t, j);
  }
  return out;
}

// Narrowband probe: magnitude of the correlation with a Hann-windowed complex
// exponential over the whole signal. Independent of the kernel bank.
double probe(const Waveform& w, double hz) {
  std::complex<double> acc = 0.0;
  const std::size_t n = w.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double win = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
    acc += w.samples[i] * win * std::polar(1.0, -2.0 * std::numbers::pi * hz * i / w.sample_rate);
  }
  return std::abs(acc);
}

}  // namespace

TEST_CASE("bin layout") {
  const CqtAnalyzer a;
  CHECK(a.config().bins == 205);
  CHECK(a.bin_frequency(0) == doctest::Approx(32.70));
  CHECK(a.bin_frequency(24) == doctest::Approx(65.40));
  CHECK(a.bin_frequency(90) == doctest::Approx(32.70 * std::exp2(90.0 / 24.0)));
}

TEST_CASE("tones land on their bins") {
  const CqtAnalyzer a;
  SUBCASE("f_min") {
    CHECK(testing::argmax(mean_row(a.analyze(testing::sine(32.70, 3.0)).magnitudes)) == 0);
  }
  SUBCASE("one octave up") {
    CHECK(testing::argmax(mean_row(a.analyze(testing::sine(65.40, 3.0)).magnitudes)) == 24);
  }
  SUBCASE("440 Hz") {
    const Waveform w = testing::sine(440.0, 3.0);
    const int expected = static_cast<int>(std::lround(24.0 * std::log2(440.0 / 32.70)));
    CHECK(expected == 90);
    CHECK(testing::argmax(mean_row(a.analyze(w).magnitudes)) == 90);
    // The narrowband probe agrees that 440 Hz is closer to bin 90 than to 89 or 91.
    CHECK(probe(w, a.bin_frequency(90)) > probe(w, a.bin_frequency(89)));
    CHECK(probe(w, a.bin_frequency(90)) > probe(w, a.bin_frequency(91)));
  }
}

TEST_CASE("frame timing and errors") {
  const CqtAnalyzer a;
  const auto c = a.analyze(testing::sine(440.0, 2.0));
  CHECK(c.magnitudes.rows() == 401);
  CHECK(c.magnitudes.cols() == 205);
  CHECK_THROWS(a.analyze(testing::sine(440.0, 0.05)));
  CHECK_THROWS(a.analyze(testing::sine(440.0, 3.0, 16000)));
}

TEST_CASE("shift_scope windows") {
  CqtMatrix c;
  c.magnitudes = Matrix(2, 205);
  for (std::size_t t = 0; t < 2; ++t) c.magnitudes(t, 100) = 1.0;
  const auto centre = shift_scope(c, 0);
  REQUIRE(centre.magnitudes.cols() == 176);
  for (std::size_t j = 0; j < 176; ++j) CHECK(centre.magnitudes(0, j) == c.magnitudes(0, 14 + j));
  const auto up = shift_scope(c, 4);
  auto peak = [](const CqtMatrix& m) {
    std::vector<double> r(m.magnitudes.row(0).begin(), m.magnitudes.row(0).end());
    return testing::argmax(r);
  };
  CHECK(peak(centre) == 86);
  CHECK(peak(up) == 82);
  for (int k = -7; k <= 7; ++k) CHECK(peak(shift_scope(c, 2 * k)) == 86u - 2 * k);
  CHECK_NOTHROW(shift_scope(c, 14));
  CHECK_NOTHROW(shift_scope(c, -14));
  CHECK_THROWS_AS(shift_scope(c, 15), std::out_of_range);
  CHECK_THROWS_AS(shift_scope(c, -15), std::out_of_range);
}

TEST_CASE("scope shift by two bins matches a tone one semitone lower") {
  const CqtAnalyzer a;
  const auto shifted = shift_scope(a.analyze(testing::sine(440.0, 2.0)), 2);
  const auto lower = shift_scope(a.analyze(testing::sine(440.0 * std::exp2(-1.0 / 12.0), 2.0)), 0);
  for (std::size_t t = 100; t < 300; t += 10) {
    std::vector<double> x(shifted.magnitudes.row(t).begin(), shifted.magnitudes.row(t).end());
    std::vector<double> y(lower.magnitudes.row(t).begin(), lower.magnitudes.row(t).end());
    CHECK(testing::correlation(x, y) > 0.99);
  }
}

TEST_CASE("log compression") {
  Matrix m(1, 3);
  m(0, 1) = 1e-3;
  m(0, 2) = 1.0;
  const auto l = log_compress(m);
  CHECK(l(0, 0) == 0.0);
  CHECK(l(0, 1) == doctest::Approx(std::log(2.0)));
  CHECK(l(0, 2) == doctest::Approx(std::log(1001.0)));
}
