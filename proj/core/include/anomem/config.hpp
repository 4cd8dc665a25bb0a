// Copyright 2026 The anomem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anomem/memory.hpp"
#include "anomem/scoring.hpp"
#include "anomem/weights.hpp"

namespace anomem {

enum class WeightSource { kBaseline, kValidated, kOracle, kFixed };

std::string_view to_string(WeightSource source) noexcept;
WeightSource parse_weight_source(std::string_view text);

struct EngineConfig {
  std::vector<int> scales{16, 32, 48, 112};
  double theta = kDefaultCoverageThreshold;
  double temperature = kDefaultTemperature;
  ScoringMode mode = ScoringMode::kComposite;
  WeightSource weight_source = WeightSource::kBaseline;
  std::vector<double> fixed_weights;  // used with WeightSource::kFixed
  SamplingSpec sampling;
  bool renormalize_empty_scales = false;
  std::uint64_t seed = 0;
  std::size_t runs = 3;
  std::size_t max_test = 100;
  std::size_t threads = 0;  // 0 = auto, not part of the hash

  // Throws kInvalidArgument on a broken invariant.
  void validate() const;
};

// Overlays the keys present in a JSON object onto `base`. Unknown keys are
// rejected so typos do not silently fall back to defaults.
EngineConfig merge_config_json(const EngineConfig& base, std::string_view json_text);

// Canonical, key-sorted JSON of every result-affecting field.
std::string canonical_config_json(const EngineConfig& config);
// 16 hex digits of FNV-1a over canonical_config_json.
std::string config_hash(const EngineConfig& config);

}  // namespace anomem
