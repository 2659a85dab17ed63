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

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "pitchdsp/matrix.hpp"

namespace pitchdsp {

// "SLSH" binary container. Each record is laid out little-endian as
//
//   char[4] magic "SLSH" | u16 version | u32 T | u32 K | f64 frame_shift_s
//   | char[8] type tag (ASCII, NUL padded) | f32 payload[T * K] (row-major)
//
// A file is one or more records back to back.
inline constexpr std::uint16_t kContainerVersion = 1;

namespace tags {
inline constexpr const char* kSpectrogram = "SPEC";
inline constexpr const char* kCqt = "CQT";
inline constexpr const char* kGuide = "GUIDE";
inline constexpr const char* kF0 = "F0";
inline constexpr const char* kEnvelope = "ENV";
inline constexpr const char* kBap = "BAP";
inline constexpr const char* kVoicing = "VUV";
inline constexpr const char* kMeta = "META";
inline constexpr const char* kPseudo = "PSEUDO";
}  // namespace tags

struct ContainerRecord {
  std::string tag;
  double frame_shift_s = 0.005;
  Matrix values;
};

class ContainerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string encode_records(const std::vector<ContainerRecord>& records);
std::vector<ContainerRecord> decode_records(const std::string& bytes);

void write_container(const std::filesystem::path& path, const std::vector<ContainerRecord>& records);
std::vector<ContainerRecord> read_container(const std::filesystem::path& path);

// Returns the first record with the given tag or throws ContainerError.
const ContainerRecord& find_record(const std::vector<ContainerRecord>& records,
                                   const std::string& tag);

// Plain CSV: optional header row, then one row per matrix row.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const Matrix& values);

}  // namespace pitchdsp
