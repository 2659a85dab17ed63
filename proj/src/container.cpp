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

#include "pitchdsp/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace pitchdsp {

namespace {

constexpr std::size_t kTagBytes = 8;
constexpr std::size_t kHeaderBytes = 4 + 2 + 4 + 4 + 8 + kTagBytes;

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
  }
}

template <typename T>
T get_le(const std::string& in, std::size_t pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

}  // namespace

std::string encode_records(const std::vector<ContainerRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    if (r.tag.empty() || r.tag.size() > kTagBytes) {
      throw ContainerError("container tag must be 1-8 characters: '" + r.tag + "'");
    }
    out += "SLSH";
    put_le<std::uint16_t>(out, kContainerVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.values.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(r.values.cols()));
    put_le<double>(out, r.frame_shift_s);
    std::string tag = r.tag;
    tag.resize(kTagBytes, '\0');
    out += tag;
    for (double v : r.values.data()) put_le<float>(out, static_cast<float>(v));
  }
  return out;
}

std::vector<ContainerRecord> decode_records(const std::string& bytes) {
  std::vector<ContainerRecord> records;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < kHeaderBytes || bytes.compare(pos, 4, "SLSH") != 0) {
      throw ContainerError("malformed container: bad magic at offset " + std::to_string(pos));
    }
    const auto version = get_le<std::uint16_t>(bytes, pos + 4);
    if (version != kContainerVersion) {
      throw ContainerError("unsupported container version " + std::to_string(version));
    }
    const auto rows = get_le<std::uint32_t>(bytes, pos + 6);
    const auto cols = get_le<std::uint32_t>(bytes, pos + 10);
    ContainerRecord r;
    r.frame_shift_s = get_le<double>(bytes, pos + 14);
    r.tag = bytes.substr(pos + 22, kTagBytes);
    r.tag.erase(r.tag.find_last_not_of('\0') + 1);
    pos += kHeaderBytes;
    const std::size_t count = static_cast<std::size_t>(rows) * cols;
    if ((bytes.size() - pos) / 4 < count) {
      throw ContainerError("malformed container: truncated payload for tag '" + r.tag + "'");
    }
    r.values = Matrix(rows, cols);
    for (std::size_t i = 0; i < count; ++i) {
      r.values.data()[i] = get_le<float>(bytes, pos + 4 * i);
    }
    pos += 4 * count;
    records.push_back(std::move(r));
  }
  return records;
}

void write_container(const std::filesystem::path& path,
                     const std::vector<ContainerRecord>& records) {
  const std::string bytes = encode_records(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContainerError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ContainerError("write failed for '" + path.string() + "'");
}

std::vector<ContainerRecord> read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContainerError("cannot open '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.empty()) throw ContainerError("'" + path.string() + "' is empty");
  return decode_records(bytes);
}

const ContainerRecord& find_record(const std::vector<ContainerRecord>& records,
                                   const std::string& tag) {
  for (const auto& r : records) {
    if (r.tag == tag) return r;
  }
  throw ContainerError("container has no '" + tag + "' record");
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw ContainerError("cannot write '" + path.string() + "'");
  out.precision(9);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  if (!header.empty()) out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) out << (c ? "," : "") << values(r, c);
    out << '\n';
  }
}

}  // namespace pitchdsp
