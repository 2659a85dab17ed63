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

#include "pitchdsp/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

namespace pitchdsp {

namespace {

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

double bessel_i0(double x) {
  // Power series; converges quickly for the beta values used here.
  double sum = 1.0;
  double term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 64; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate <= 0) throw std::invalid_argument("waveform: sample_rate must be positive");
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("waveform: non-finite sample");
  }
}

Waveform load_wav(const std::filesystem::path& path, ChannelMix mix) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AudioIoError("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw AudioIoError("'" + path.string() + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Truncated data chunks are common in the wild; accept what exists.
      if (std::memcmp(chunk, "data", 4) != 0) break;
    }
    const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0 && avail >= 16) {
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible && avail >= 26) format = read_u16(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = avail;
    }
    pos = body + size + (size & 1u);
  }
  if (channels == 0 || rate == 0) throw AudioIoError("'" + path.string() + "': missing fmt chunk");
  if (data == nullptr) throw AudioIoError("'" + path.string() + "': missing data chunk");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw AudioIoError("'" + path.string() + "': unsupported codec (format " +
                       std::to_string(format) + ", " + std::to_string(bits) +
                       " bits); expected 16-bit PCM or 32-bit float");
  }
  if (channels > 2) {
    throw AudioIoError("'" + path.string() + "': " + std::to_string(channels) +
                       " channels; only mono or stereo is supported");
  }

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  auto sample_at = [&](std::size_t frame, std::size_t ch) -> double {
    const unsigned char* p = data + (frame * channels + ch) * width;
    if (pcm16) return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    return static_cast<double>(std::bit_cast<float>(read_u32(p)));
  };

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  w.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    if (channels == 1) {
      w.samples[i] = sample_at(i, 0);
    } else if (mix == ChannelMix::kLeft) {
      w.samples[i] = sample_at(i, 0);
    } else if (mix == ChannelMix::kRight) {
      w.samples[i] = sample_at(i, 1);
    } else {
      w.samples[i] = 0.5 * (sample_at(i, 0) + sample_at(i, 1));
    }
  }
  validate(w);
  return w;
}

void save_wav(const std::filesystem::path& path, const Waveform& w, SampleFormat format) {
  validate(w);
  const bool pcm16 = format == SampleFormat::kPcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(w.samples.size() * (bits / 8));

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * (bits / 8));
  put_u16(out, bits / 8);
  put_u16(out, bits);
  out += "data";
  put_u32(out, data_bytes);
  for (double s : w.samples) {
    if (pcm16) {
      const long v = std::clamp(std::lround(s * 32768.0), -32768L, 32767L);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw AudioIoError("cannot write '" + path.string() + "'");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw AudioIoError("write failed for '" + path.string() + "'");
}

Waveform resample_from(const std::vector<double>& samples, double source_rate,
                       int target_rate) {
  if (target_rate <= 0) throw std::invalid_argument("resample: target_rate must be positive");
  if (!(source_rate > 0.0)) throw std::invalid_argument("resample: source rate must be positive");

  Waveform out;
  out.sample_rate = target_rate;
  if (source_rate == static_cast<double>(target_rate)) {
    out.samples = samples;
    return out;
  }

  constexpr double kZeroCrossings = 32.0;
  constexpr double kBeta = 9.0;
  constexpr double kRolloff = 0.97;
  const double step = source_rate / target_rate;  // input samples per output sample
  // Normalized cutoff relative to the input Nyquist.
  const double cutoff = target_rate >= source_rate ? 1.0 : kRolloff / step;
  const double half_width = kZeroCrossings / cutoff;
  const double i0_beta = bessel_i0(kBeta);

  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(samples.size()) * target_rate / source_rate));
  out.samples.assign(n_out, 0.0);
  const auto n_in = static_cast<long long>(samples.size());
  for (std::size_t m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) * step;
    const long long lo = std::max<long long>(0, static_cast<long long>(std::ceil(t - half_width)));
    const long long hi =
        std::min<long long>(n_in - 1, static_cast<long long>(std::floor(t + half_width)));
    double acc = 0.0;
    for (long long n = lo; n <= hi; ++n) {
      const double x = t - static_cast<double>(n);
      const double r = x / half_width;
      if (r * r >= 1.0) continue;
      const double arg = std::numbers::pi * cutoff * x;
      const double sinc = x == 0.0 ? 1.0 : std::sin(arg) / arg;
      const double window = bessel_i0(kBeta * std::sqrt(1.0 - r * r)) / i0_beta;
      acc += samples[static_cast<std::size_t>(n)] * cutoff * sinc * window;
    }
    out.samples[m] = acc;
  }
  return out;
}

Waveform resample(const Waveform& w, int target_rate) {
  validate(w);
  return resample_from(w.samples, static_cast<double>(w.sample_rate), target_rate);
}

double semitone_to_hz(double semitone) {
  return 440.0 * std::exp2((semitone - 69.0) / 12.0);
}

PitchLabelTrack parse_pitch_labels(const std::string& text, double frame_shift_s,
                                   LabelUnits units) {
  PitchLabelTrack track;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t one_column_rows = 0;
  std::size_t two_column_rows = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v)) {
        throw AudioIoError("pitch labels line " + std::to_string(line_no) +
                           ": non-numeric value '" + token + "'");
      }
      values.push_back(v);
    }
    double time = 0.0;
    double value = 0.0;
    if (values.size() == 1) {
      ++one_column_rows;
      time = static_cast<double>(track.size()) * frame_shift_s;
      value = values[0];
    } else if (values.size() == 2) {
      ++two_column_rows;
      time = values[0];
      value = values[1];
    } else {
      throw AudioIoError("pitch labels line " + std::to_string(line_no) +
                         ": expected 1 or 2 columns");
    }
    if (one_column_rows > 0 && two_column_rows > 0) {
      throw AudioIoError("pitch labels line " + std::to_string(line_no) +
                         ": mixed one- and two-column rows");
    }
    if (!track.times.empty() && !(time > track.times.back())) {
      throw AudioIoError("pitch labels line " + std::to_string(line_no) +
                         ": times must be strictly increasing");
    }
    double hz = 0.0;
    if (value > 0.0) hz = units == LabelUnits::kSemitone ? semitone_to_hz(value) : value;
    if (value < 0.0 || (hz != 0.0 && (hz < 20.0 || hz > 2000.0))) {
      throw AudioIoError("pitch labels line " + std::to_string(line_no) +
                         ": F0 outside [20, 2000] Hz");
    }
    track.times.push_back(time);
    track.f0_hz.push_back(hz);
  }
  return track;
}

PitchLabelTrack load_pitch_labels(const std::filesystem::path& path, double frame_shift_s,
                                  LabelUnits units) {
  std::ifstream in(path);
  if (!in) throw AudioIoError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_pitch_labels(buffer.str(), frame_shift_s, units);
}

void save_pitch_labels(const std::filesystem::path& path, const PitchLabelTrack& labels) {
  std::ofstream out(path);
  if (!out) throw AudioIoError("cannot write '" + path.string() + "'");
  out.precision(10);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels.times[i] << ' ' << labels.f0_hz[i] << '\n';
  }
}

}  // namespace pitchdsp
