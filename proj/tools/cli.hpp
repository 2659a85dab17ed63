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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pitchdsp/container.hpp"
#include "pitchdsp/estimator.hpp"
#include "pitchdsp/features.hpp"

namespace pitchdsp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point shared by the executable and the tests. args[0] is the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<ContainerRecord> feature_records(const VocoderFeatureSet& f);
VocoderFeatureSet features_from_records(const std::vector<ContainerRecord>& records);

// Applies "key = value" lines (blank lines and '#' comments skipped) to cfg.
// Unknown keys and malformed values throw std::invalid_argument.
void apply_config_text(const std::string& text, EstimatorConfig& cfg);
// "w_pseudo,w_g,w_recon,w_tv".
LossWeights parse_weights(const std::string& text);

}  // namespace pitchdsp::cli
