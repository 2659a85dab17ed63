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

#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "pitchdsp/audio_io.hpp"
#include "pitchdsp/metrics.hpp"
#include "pitchdsp/pitch_guide.hpp"
#include "pitchdsp/synth.hpp"

namespace pitchdsp::cli {

namespace {

// Failures in the input data rather than in the command line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw std::invalid_argument("bad value for " + key + ": '" + value + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void apply_key(const std::string& key, const std::string& value, EstimatorConfig& cfg) {
  if (key == "weights") {
    cfg.weights = parse_weights(value);
    return;
  }
  const double v = parse_double(key, value);
  auto as_int = [&]() {
    if (v != std::floor(v)) throw std::invalid_argument(key + " must be an integer");
    return static_cast<long long>(v);
  };
  if (key == "steps") {
    cfg.steps = static_cast<int>(as_int());
  } else if (key == "seed") {
    if (v < 0) throw std::invalid_argument("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(as_int());
  } else if (key == "hop_ms") {
    cfg.spectral.frame_shift_s = v / 1000.0;
  } else if (key == "fft_size") {
    cfg.spectral.fft_size = static_cast<int>(as_int());
  } else if (key == "theta") {
    cfg.theta = v;
  } else if (key == "m") {
    cfg.m = v;
  } else if (key == "alpha") {
    cfg.alpha = v;
  } else if (key == "eps") {
    cfg.eps = v;
  } else if (key == "lr_log2f0") {
    cfg.lr_log2f0 = v;
  } else if (key == "lr_bap_logit") {
    cfg.lr_bap_logit = v;
  } else if (key == "lr_final_ratio") {
    cfg.lr_final_ratio = v;
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::string(magic, 4) == "SLSH";
}

ChannelMix parse_channel(const std::string& s) {
  if (s == "average" || s == "avg") return ChannelMix::kAverage;
  if (s == "left") return ChannelMix::kLeft;
  if (s == "right") return ChannelMix::kRight;
  throw std::invalid_argument("--channel must be average, left or right");
}

// Options shared by every command that runs the estimator.
struct EstimatorFlags {
  std::string config_path;
  std::optional<long long> steps;
  std::optional<unsigned long long> seed;
  std::optional<double> hop_ms;
  std::optional<int> fft_size;
  std::optional<double> theta, m, alpha, eps;
  std::optional<std::string> weights;
  std::string channel = "average";

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file; flags take precedence");
    app->add_option("--steps", steps, "optimization steps");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--hop-ms", hop_ms, "frame shift in milliseconds");
    app->add_option("--fft-size", fft_size, "FFT size");
    app->add_option("--theta", theta, "voicing threshold");
    app->add_option("--m", m, "guide hinge margin");
    app->add_option("--alpha", alpha, "repulsive weight of the reconstruction loss");
    app->add_option("--eps", eps, "pseudo excitation floor");
    app->add_option("--weights", weights, "w_pseudo,w_g,w_recon,w_tv");
    app->add_option("--channel", channel, "average, left or right");
  }

  EstimatorConfig build() const {
    EstimatorConfig cfg;
    if (!config_path.empty()) apply_config_text(read_text(config_path), cfg);
    if (steps) {
      if (*steps <= 0) throw std::invalid_argument("--steps must be positive");
      cfg.steps = static_cast<int>(*steps);
    }
    if (seed) cfg.seed = *seed;
    if (hop_ms) cfg.spectral.frame_shift_s = *hop_ms / 1000.0;
    if (fft_size) cfg.spectral.fft_size = *fft_size;
    if (theta) cfg.theta = *theta;
    if (m) cfg.m = *m;
    if (alpha) cfg.alpha = *alpha;
    if (eps) cfg.eps = *eps;
    if (weights) cfg.weights = parse_weights(*weights);
    cfg.validate();
    parse_channel(channel);
    return cfg;
  }
};

Waveform load_internal(const std::filesystem::path& path, ChannelMix mix) {
  Waveform w = load_wav(path, mix);
  if (w.sample_rate != kInternalSampleRate) w = resample(w, kInternalSampleRate);
  return w;
}

void write_feature_csv(const std::filesystem::path& path, const VocoderFeatureSet& f) {
  const std::size_t frames = f.pitch.size();
  const std::size_t bands = f.bap.values.cols();
  std::vector<std::string> header{"time", "f0", "vuv", "v_prime"};
  for (std::size_t b = 0; b < bands; ++b) header.push_back("bap_" + std::to_string(b));
  Matrix m(frames, 4 + bands);
  for (std::size_t t = 0; t < frames; ++t) {
    m(t, 0) = static_cast<double>(t) * f.frame_shift_s;
    m(t, 1) = f.pitch.hz(t);
    m(t, 2) = f.voicing.voiced(t) ? 1.0 : 0.0;
    m(t, 3) = f.voicing.soft_ratio[t];
    for (std::size_t b = 0; b < bands; ++b) m(t, 4 + b) = f.bap.values(t, b);
  }
  write_csv(path, header, m);
}

void analyze_one(const std::filesystem::path& in, const std::filesystem::path& out, bool csv,
                 const EstimatorConfig& cfg, ChannelMix mix) {
  const VocoderFeatureSet f = analyze_features(load_internal(in, mix), cfg);
  write_container(out, feature_records(f));
  if (csv) {
    auto csv_path = out;
    write_feature_csv(csv_path.replace_extension(".csv"), f);
  }
}

int cmd_analyze(const std::vector<std::string>& inputs, const std::string& output, bool csv,
                int jobs, const EstimatorFlags& flags, std::ostream& out) {
  EstimatorConfig cfg;
  ChannelMix mix = ChannelMix::kAverage;
  try {
    cfg = flags.build();
    mix = parse_channel(flags.channel);
    if (jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  if (inputs.size() == 1) {
    analyze_one(inputs.front(), output, csv, cfg, mix);
    out << "wrote " << output << "\n";
    return kExitOk;
  }
  std::filesystem::create_directories(output);
  std::vector<std::filesystem::path> targets;
  for (const auto& in : inputs) {
    targets.push_back(std::filesystem::path(output) /
                      std::filesystem::path(in).filename().replace_extension(".slsh"));
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(inputs.size());
  auto worker = [&]() {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        analyze_one(inputs[i], targets[i], csv, cfg, mix);
      } catch (const std::exception& e) {
        errors[i] = inputs[i] + ": " + e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(jobs), inputs.size());
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  std::string failures;
  for (const auto& e : errors) {
    if (!e.empty()) failures += e + "\n";
  }
  if (!failures.empty()) throw DataError(failures);
  for (const auto& t : targets) out << "wrote " << t.string() << "\n";
  return kExitOk;
}

int cmd_synth(const std::string& input, const std::string& output, std::uint64_t seed,
              std::ostream& out) {
  const VocoderFeatureSet f = features_from_records(read_container(input));
  SynthesisConfig sc;
  sc.fft_size = f.fft_size;
  sc.frame_shift_s = f.frame_shift_s;
  sc.sample_rate = f.sample_rate;
  const auto r = synthesize(f.pitch, f.envelope, f.aperiodicity, seed, f.num_samples, sc);
  save_wav(output, r.waveform);
  out << "wrote " << output << "\n";
  return kExitOk;
}

int cmd_guide(const std::string& input, const std::string& output, const EstimatorFlags& flags,
              std::ostream& out) {
  EstimatorConfig cfg;
  ChannelMix mix = ChannelMix::kAverage;
  try {
    cfg = flags.build();
    mix = parse_channel(flags.channel);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  const Waveform w = load_internal(input, mix);
  const auto s = stft_amplitude(w, cfg.spectral.fft_size, cfg.spectral.frame_shift_s);
  const PitchGuide g = build_pitch_guide(s, cfg.spectral, cfg.guide);
  std::vector<std::string> header{"time"};
  for (double f : g.freq_axis) {
    std::ostringstream os;
    os.precision(10);
    os << f;
    header.push_back(os.str());
  }
  Matrix m(g.values.rows(), g.values.cols() + 1);
  for (std::size_t t = 0; t < g.values.rows(); ++t) {
    m(t, 0) = static_cast<double>(t) * g.frame_shift_s;
    for (std::size_t i = 0; i < g.values.cols(); ++i) m(t, i + 1) = g.values(t, i);
  }
  write_csv(output, header, m);
  out << "wrote " << output << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& est_path, const std::string& ref_path, double hop_ms,
             const std::string& units, bool log2, const std::string& json_path,
             std::ostream& out) {
  if (!(hop_ms > 0.0)) throw CLI::ValidationError("--hop-ms must be positive");
  LabelUnits u = LabelUnits::kHz;
  if (units == "semitone") {
    u = LabelUnits::kSemitone;
  } else if (units != "hz") {
    throw CLI::ValidationError("--units must be hz or semitone");
  }
  const double shift = hop_ms / 1000.0;
  const PitchLabelTrack ref = load_pitch_labels(ref_path, shift, u);
  AlignedTracks a;
  if (looks_like_container(est_path)) {
    const VocoderFeatureSet f = features_from_records(read_container(est_path));
    a = align_tracks(f.pitch, f.voicing, f.frame_shift_s, ref);
  } else {
    a = align_label_tracks(load_pitch_labels(est_path, shift), ref, shift);
  }
  const MetricReport r = evaluate(a, log2 ? LogBase::kTwo : LogBase::kNatural);
  out << format_key_value(r);
  if (!json_path.empty()) {
    std::ofstream js(json_path);
    if (!js) throw DataError("cannot write " + json_path);
    js << format_json(r);
  }
  return kExitOk;
}

int cmd_pseudo_demo(const std::string& input, long long frame, const std::string& output,
                    const EstimatorFlags& flags, std::ostream& out) {
  EstimatorConfig cfg;
  ChannelMix mix = ChannelMix::kAverage;
  try {
    cfg = flags.build();
    mix = parse_channel(flags.channel);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  if (frame < 0) throw CLI::ValidationError("--frame must be non-negative");
  const Waveform w = load_internal(input, mix);
  const std::size_t frames =
      frame_count(w.samples.size(), hop_samples(w.sample_rate, cfg.spectral.frame_shift_s));
  if (static_cast<std::size_t>(frame) >= frames) {
    throw CLI::ValidationError("--frame " + std::to_string(frame) + " is past the last frame (" +
                               std::to_string(frames - 1) + ")");
  }
  const EstimationResult r = estimate(w, cfg);
  const PseudoObjective obj = final_pseudo_objective(r, cfg, cfg.seed);
  const auto t = static_cast<std::size_t>(frame);
  const auto excitation = obj.frame_excitation(t, r.pitch.log2_hz(t));
  const auto pseudo = obj.frame_pseudo_spectrum(t, r.pitch.log2_hz(t));
  const auto& s = r.spectrogram;
  Matrix m(s.bins(), 5);
  for (std::size_t k = 0; k < s.bins(); ++k) {
    m(k, 0) = static_cast<double>(k);
    m(k, 1) = s.bin_hz(k);
    m(k, 2) = s.values(t, k);
    m(k, 3) = excitation[k];
    m(k, 4) = pseudo[k];
  }
  write_csv(output, {"bin", "freq_hz", "target", "pseudo_excitation", "pseudo_spectrum"}, m);
  out << "frame " << t << " f0=" << r.pitch.hz(t) << " voiced=" << r.voicing.voiced(t) << "\n";
  out << "wrote " << output << "\n";
  return kExitOk;
}

}  // namespace

LossWeights parse_weights(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_double("weights", trim(item)));
  if (v.size() != 4) {
    throw std::invalid_argument("weights needs four values: w_pseudo,w_g,w_recon,w_tv");
  }
  return {v[0], v[1], v[2], v[3]};
}

void apply_config_text(const std::string& text, EstimatorConfig& cfg) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    }
    apply_key(trim(body.substr(0, eq)), trim(body.substr(eq + 1)), cfg);
  }
}

std::vector<ContainerRecord> feature_records(const VocoderFeatureSet& f) {
  const std::size_t frames = f.pitch.size();
  std::vector<ContainerRecord> records;
  Matrix f0(frames, 1);
  for (std::size_t t = 0; t < frames; ++t) f0(t, 0) = f.pitch.hz(t);
  Matrix vuv(frames, 2);
  for (std::size_t t = 0; t < frames; ++t) {
    vuv(t, 0) = f.voicing.voiced(t) ? 1.0 : 0.0;
    vuv(t, 1) = f.voicing.soft_ratio[t];
  }
  Matrix meta(1, 2);
  meta(0, 0) = f.sample_rate;
  meta(0, 1) = static_cast<double>(f.num_samples);
  records.push_back({tags::kMeta, f.frame_shift_s, meta});
  records.push_back({tags::kF0, f.frame_shift_s, f0});
  records.push_back({tags::kEnvelope, f.frame_shift_s, f.envelope.log_values});
  records.push_back({tags::kBap, f.frame_shift_s, f.bap.values});
  records.push_back({tags::kVoicing, f.frame_shift_s, vuv});
  return records;
}

VocoderFeatureSet features_from_records(const std::vector<ContainerRecord>& records) {
  const auto& meta = find_record(records, tags::kMeta);
  const auto& f0 = find_record(records, tags::kF0);
  const auto& env = find_record(records, tags::kEnvelope);
  const auto& bap = find_record(records, tags::kBap);
  const auto& vuv = find_record(records, tags::kVoicing);
  const std::size_t frames = f0.values.rows();
  if (meta.values.rows() != 1 || meta.values.cols() < 2 || f0.values.cols() != 1 ||
      env.values.rows() != frames || bap.values.rows() != frames || vuv.values.rows() != frames ||
      vuv.values.cols() != 2 || bap.values.cols() != static_cast<std::size_t>(kBapBands) ||
      env.values.cols() < 3 || frames == 0) {
    throw ContainerError("feature container: inconsistent record shapes");
  }
  VocoderFeatureSet f;
  f.frame_shift_s = f0.frame_shift_s;
  f.sample_rate = static_cast<int>(meta.values(0, 0));
  f.num_samples = static_cast<std::size_t>(meta.values(0, 1));
  f.fft_size = static_cast<int>(2 * (env.values.cols() - 1));
  std::vector<double> hz(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    hz[t] = f0.values(t, 0);
    if (!(hz[t] > 0.0)) throw ContainerError("feature container: non-positive F0");
  }
  f.pitch = PitchTrack::from_hz(hz);
  f.envelope.log_values = env.values;
  f.bap.values = bap.values;
  f.bap.clamp();
  f.aperiodicity = bap_to_aperiodicity(f.bap, env.values.cols(), f.sample_rate, f.fft_size);
  f.voicing.flags.resize(frames);
  f.voicing.soft_ratio.resize(frames);
  f.voicing.degenerate.assign(frames, 0);
  for (std::size_t t = 0; t < frames; ++t) {
    f.voicing.flags[t] = vuv.values(t, 0) > 0.5 ? 1 : 0;
    f.voicing.soft_ratio[t] = vuv.values(t, 1);
  }
  return f;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pitch, aperiodicity and voicing analysis by spectral matching"};
  app.require_subcommand(1);

  EstimatorFlags analyze_flags, guide_flags, demo_flags;
  std::vector<std::string> analyze_inputs;
  std::string analyze_output;
  bool analyze_csv = false;
  int jobs = 1;
  auto* analyze = app.add_subcommand("analyze", "estimate features and write a container");
  analyze->add_option("inputs", analyze_inputs, "input WAV files")->required();
  analyze->add_option("-o,--output", analyze_output,
                      "container path (one input) or directory (several)")
      ->required();
  analyze->add_flag("--csv", analyze_csv, "also write per-frame CSV next to each container");
  analyze->add_option("--jobs", jobs, "files processed in parallel");
  analyze_flags.attach(analyze);

  std::string synth_input, synth_output;
  unsigned long long synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "render a feature container to a 24 kHz WAV");
  synth->add_option("input", synth_input, "feature container")->required();
  synth->add_option("-o,--output", synth_output, "output WAV")->required();
  synth->add_option("--seed", synth_seed, "noise seed");

  std::string guide_input, guide_output;
  auto* guide = app.add_subcommand("guide", "write the pitch guide matrix as CSV");
  guide->add_option("input", guide_input, "input WAV")->required();
  guide->add_option("-o,--output", guide_output, "output CSV")->required();
  guide_flags.attach(guide);

  std::string eval_est, eval_ref, eval_units = "hz", eval_json;
  double eval_hop_ms = 5.0;
  bool eval_log2 = false;
  auto* eval = app.add_subcommand("eval", "score an estimate against reference labels");
  eval->add_option("estimate", eval_est, "feature container or 'time f0' text")->required();
  eval->add_option("reference", eval_ref, "reference labels")->required();
  eval->add_option("--hop-ms", eval_hop_ms, "label frame shift for single-column files");
  eval->add_option("--units", eval_units, "reference units: hz or semitone");
  eval->add_flag("--log2", eval_log2, "RMSE in log2 instead of natural log");
  eval->add_option("--json", eval_json, "also write the report as JSON");

  std::string demo_input, demo_output;
  long long demo_frame = 0;
  auto* demo = app.add_subcommand("pseudo-demo", "emit S_t and E*_t for one frame after fitting");
  demo->add_option("input", demo_input, "input WAV")->required();
  demo->add_option("--frame", demo_frame, "frame index")->required();
  demo->add_option("-o,--output", demo_output, "output CSV")->required();
  demo_flags.attach(demo);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (*analyze) {
      return cmd_analyze(analyze_inputs, analyze_output, analyze_csv, jobs, analyze_flags, out);
    }
    if (*synth) return cmd_synth(synth_input, synth_output, synth_seed, out);
    if (*guide) return cmd_guide(guide_input, guide_output, guide_flags, out);
    if (*eval) {
      return cmd_eval(eval_est, eval_ref, eval_hop_ms, eval_units, eval_log2, eval_json, out);
    }
    if (*demo) return cmd_pseudo_demo(demo_input, demo_frame, demo_output, demo_flags, out);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace pitchdsp::cli
