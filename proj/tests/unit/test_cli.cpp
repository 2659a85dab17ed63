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

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "helpers.hpp"
#include "pitchdsp/container.hpp"
#include "pitchdsp/fixtures.hpp"
#include "pitchdsp/synth.hpp"

using namespace pitchdsp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "pitchdsp");
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  return {code, o.str(), e.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<double> split_csv(const std::string& line) {
  std::vector<double> v;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
  return v;
}

const fs::path& vowel_wav() {
  static const fs::path p = [] {
    const auto dir = testing::scratch_dir("cli");
    save_wav(dir / "v200.wav", make_flat_vowel(200.0).waveform);
    return dir / "v200.wav";
  }();
  return p;
}

// Flatness of the frame-averaged power spectrum.
double welch_flatness(const Waveform& w) {
  const auto s = stft_amplitude(w, 512);
  std::vector<double> power(s.bins(), 0.0);
  for (std::size_t t = 0; t < s.frames(); ++t)
    for (std::size_t k = 0; k < s.bins(); ++k) power[k] += s.values(t, k) * s.values(t, k);
  double log_sum = 0.0, sum = 0.0;
  for (std::size_t k = 1; k + 1 < power.size(); ++k) {
    log_sum += std::log(power[k]);
    sum += power[k];
  }
  const double n = static_cast<double>(power.size() - 2);
  return std::exp(log_sum / n) / (sum / n);
}

}  // namespace

TEST_CASE("analyze writes one frame per hop plus one") {
  const auto dir = testing::scratch_dir("cli_analyze");
  const auto r = call({"analyze", vowel_wav().string(), "-o", (dir / "a.slsh").string(), "--steps",
                       "5", "--csv"});
  REQUIRE(r.code == 0);
  const auto f = cli::features_from_records(read_container(dir / "a.slsh"));
  CHECK(f.pitch.size() == 201);
  CHECK(f.num_samples == 24000);
  const auto csv = lines(dir / "a.csv");
  CHECK(csv.size() == 202);
  CHECK(csv.front().rfind("time,f0,vuv", 0) == 0);
}

TEST_CASE("analyze is reproducible under a seed and rejects bad flags") {
  const auto dir = testing::scratch_dir("cli_seed");
  const auto wav = vowel_wav().string();
  REQUIRE(call({"analyze", wav, "-o", (dir / "x.slsh").string(), "--steps", "8", "--seed", "7"}).code == 0);
  REQUIRE(call({"analyze", wav, "-o", (dir / "y.slsh").string(), "--steps", "8", "--seed", "7"}).code == 0);
  CHECK(slurp(dir / "x.slsh") == slurp(dir / "y.slsh"));

  CHECK(call({"analyze", wav, "-o", (dir / "z.slsh").string(), "--steps", "0"}).code == 1);
  CHECK(call({"analyze", wav, "-o", (dir / "z.slsh").string(), "--weights", "1,2"}).code == 1);
  CHECK(call({"analyze", (dir / "missing.wav").string(), "-o", (dir / "z.slsh").string()}).code == 2);
  CHECK(call({}).code == 1);
}

TEST_CASE("config file values yield to flags") {
  const auto dir = testing::scratch_dir("cli_config");
  EstimatorConfig c;
  cli::apply_config_text("# comment\nsteps = 12\n\nseed=4\nweights = 1, 0, 2, 0.5\n", c);
  CHECK(c.steps == 12);
  CHECK(c.seed == 4);
  CHECK(c.weights.pseudo == 1.0);
  CHECK(c.weights.tv == 0.5);
  CHECK_THROWS_AS(cli::apply_config_text("bogus = 1\n", c), std::invalid_argument);
  CHECK_THROWS_AS(cli::apply_config_text("steps = many\n", c), std::invalid_argument);

  {
    std::ofstream(dir / "run.cfg") << "steps = 6\nseed = 9\n";
  }
  const auto wav = vowel_wav().string();
  REQUIRE(call({"analyze", wav, "-o", (dir / "a.slsh").string(), "--config", (dir / "run.cfg").string()}).code == 0);
  REQUIRE(call({"analyze", wav, "-o", (dir / "b.slsh").string(), "--steps", "6", "--seed", "9"}).code == 0);
  REQUIRE(call({"analyze", wav, "-o", (dir / "c.slsh").string(), "--config", (dir / "run.cfg").string(),
                "--seed", "2"}).code == 0);
  CHECK(slurp(dir / "a.slsh") == slurp(dir / "b.slsh"));
  CHECK(slurp(dir / "a.slsh") != slurp(dir / "c.slsh"));

  {
    std::ofstream(dir / "bad.cfg") << "nonsense\n";
  }
  CHECK(call({"analyze", wav, "-o", (dir / "d.slsh").string(), "--config", (dir / "bad.cfg").string()}).code == 1);
  CHECK(call({"analyze", wav, "-o", (dir / "d.slsh").string(), "--config", (dir / "none.cfg").string()}).code == 2);
}

TEST_CASE("synth round trip, noise-only rendering, reproducibility") {
  const auto dir = testing::scratch_dir("cli_synth");
  REQUIRE(call({"analyze", vowel_wav().string(), "-o", (dir / "a.slsh").string(), "--steps", "5"}).code == 0);
  REQUIRE(call({"synth", (dir / "a.slsh").string(), "-o", (dir / "a.wav").string(), "--seed", "3"}).code == 0);
  REQUIRE(call({"synth", (dir / "a.slsh").string(), "-o", (dir / "b.wav").string(), "--seed", "3"}).code == 0);
  CHECK(load_wav(dir / "a.wav").samples.size() == 24000);
  CHECK(slurp(dir / "a.wav") == slurp(dir / "b.wav"));

  // Fully aperiodic features over a flat envelope render as white noise.
  auto f = cli::features_from_records(read_container(dir / "a.slsh"));
  for (double& v : f.envelope.log_values.data()) v = 0.0;
  for (double& v : f.bap.values.data()) v = kBapMax;
  f.aperiodicity = bap_to_aperiodicity(f.bap, f.envelope.log_values.cols());
  for (auto& flag : f.voicing.flags) flag = 0;
  write_container(dir / "noise.slsh", cli::feature_records(f));
  REQUIRE(call({"synth", (dir / "noise.slsh").string(), "-o", (dir / "noise.wav").string()}).code == 0);
  const double flat = welch_flatness(load_wav(dir / "noise.wav"));
  MESSAGE("flatness " << flat);
  CHECK(flat > 0.5);
  // The source vowel is far from flat.
  CHECK(welch_flatness(load_wav(vowel_wav())) < 0.1);

  CHECK(call({"synth", (dir / "nope.slsh").string(), "-o", (dir / "c.wav").string()}).code == 2);
}

TEST_CASE("guide CSV rows peak at one") {
  const auto dir = testing::scratch_dir("cli_guide");
  REQUIRE(call({"guide", vowel_wav().string(), "-o", (dir / "g.csv").string()}).code == 0);
  const auto rows = lines(dir / "g.csv");
  REQUIRE(rows.size() == 202);
  const auto header = rows.front();
  CHECK(header.rfind("time,20", 0) == 0);
  CHECK(std::stod(header.substr(header.rfind(',') + 1)) == doctest::Approx(2000.0));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto v = split_csv(rows[i]);
    CHECK(v.size() == 1025);
    CHECK(*std::max_element(v.begin() + 1, v.end()) == 1.0);
  }
}

TEST_CASE("eval scores text estimates and containers") {
  const auto dir = testing::scratch_dir("cli_eval");
  const auto labels = make_flat_vowel(200.0).labels;
  save_pitch_labels(dir / "ref.f0", labels);
  auto doubled = labels;
  for (double& f : doubled.f0_hz) f *= 2.0;
  save_pitch_labels(dir / "oct.f0", doubled);

  auto self = call({"eval", (dir / "ref.f0").string(), (dir / "ref.f0").string(), "--json",
                    (dir / "r.json").string()});
  REQUIRE(self.code == 0);
  CHECK(self.out.find("rpa50=1\n") != std::string::npos);
  CHECK(self.out.find("log_f0_rmse=0\n") != std::string::npos);
  CHECK(fs::exists(dir / "r.json"));

  const auto oct = call({"eval", (dir / "oct.f0").string(), (dir / "ref.f0").string()});
  REQUIRE(oct.code == 0);
  CHECK(oct.out.find("rpa50=0\n") != std::string::npos);
  CHECK(oct.out.find("rca50=1\n") != std::string::npos);

  REQUIRE(call({"analyze", vowel_wav().string(), "-o", (dir / "a.slsh").string(), "--steps", "40"}).code == 0);
  const auto c = call({"eval", (dir / "a.slsh").string(), (dir / "ref.f0").string()});
  REQUIRE(c.code == 0);
  CHECK(c.out.find("rpa50=") != std::string::npos);
  CHECK(call({"eval", (dir / "ref.f0").string(), (dir / "ref.f0").string(), "--units", "mel"}).code == 1);
}

TEST_CASE("pseudo-demo writes one row per bin") {
  const auto dir = testing::scratch_dir("cli_demo");
  const auto r = call({"pseudo-demo", vowel_wav().string(), "--frame", "100", "-o",
                       (dir / "d.csv").string(), "--steps", "5"});
  REQUIRE(r.code == 0);
  const auto rows = lines(dir / "d.csv");
  CHECK(rows.size() == 1026);
  CHECK(rows.front() == "bin,freq_hz,target,pseudo_excitation,pseudo_spectrum");
  CHECK(call({"pseudo-demo", vowel_wav().string(), "--frame", "-1", "-o", (dir / "e.csv").string()}).code == 1);
  CHECK(call({"pseudo-demo", vowel_wav().string(), "--frame", "201", "-o", (dir / "e.csv").string(),
              "--steps", "2"}).code == 1);
}
