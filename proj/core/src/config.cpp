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

#include "anomem/config.hpp"

#include <cstdio>
#include <set>
#include <string>

#include "anomem/error.hpp"
#include "anomem/rng.hpp"
#include "json_util.hpp"

namespace anomem {
using detail::Json;

std::string_view to_string(WeightSource source) noexcept {
  switch (source) {
    case WeightSource::kBaseline: return "baseline";
    case WeightSource::kValidated: return "validated";
    case WeightSource::kOracle: return "oracle";
    case WeightSource::kFixed: return "fixed";
  }
  return "baseline";
}

WeightSource parse_weight_source(std::string_view text) {
  if (text == "baseline") return WeightSource::kBaseline;
  if (text == "validated") return WeightSource::kValidated;
  if (text == "oracle") return WeightSource::kOracle;
  if (text == "fixed") return WeightSource::kFixed;
  throw Error(ErrorKind::kInvalidArgument, "unknown weight source '" + std::string(text) + "'");
}

void EngineConfig::validate() const {
  if (scales.empty()) throw Error(ErrorKind::kInvalidArgument, "at least one scale is required");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] <= 0 || (i > 0 && scales[i] <= scales[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument, "scales must be positive and strictly increasing");
    }
  }
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "theta must lie in [0, 1]");
  }
  if (!(temperature > 0.0)) throw Error(ErrorKind::kInvalidArgument, "temperature must be positive");
  if (runs == 0) throw Error(ErrorKind::kInvalidArgument, "runs must be >= 1");
  if (max_test < 2) throw Error(ErrorKind::kInvalidArgument, "max_test must be >= 2");
  if (weight_source == WeightSource::kFixed) {
    if (fixed_weights.size() != 1 + 2 * scales.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "fixed weights need " + std::to_string(1 + 2 * scales.size()) + " values");
    }
    WeightVector check(fixed_weights);
  }
  if (mode == ScoringMode::kWinclipCompat && weight_source != WeightSource::kBaseline) {
    throw Error(ErrorKind::kInvalidArgument, "winclip-compat mode uses its own fixed weights");
  }
  sampling.validate();
}

EngineConfig merge_config_json(const EngineConfig& base, std::string_view json_text) {
  const std::string what = "config";
  const Json j = detail::parse_json(json_text, what);
  if (!j.is_object()) throw Error(ErrorKind::kFormat, "config must be a JSON object");
  static const std::set<std::string> known = {
      "scales", "theta", "tau", "temperature", "mode", "weights", "fixed_weights", "dist",
      "distribution", "n", "n_samples", "scale_factor", "dof", "include_baseline",
      "renormalize_empty_scales", "seed", "runs", "max_test", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw Error(ErrorKind::kFormat, "unknown config key '" + it.key() + "'");
  }
  EngineConfig c = base;
  try {
    if (j.contains("scales")) c.scales = j["scales"].get<std::vector<int>>();
    if (j.contains("theta")) c.theta = j["theta"].get<double>();
    if (j.contains("tau")) c.temperature = j["tau"].get<double>();
    if (j.contains("temperature")) c.temperature = j["temperature"].get<double>();
    if (j.contains("mode")) c.mode = parse_scoring_mode(j["mode"].get<std::string>());
    if (j.contains("weights")) c.weight_source = parse_weight_source(j["weights"].get<std::string>());
    if (j.contains("fixed_weights")) {
      c.fixed_weights = j["fixed_weights"].get<std::vector<double>>();
      if (!j.contains("weights")) c.weight_source = WeightSource::kFixed;
    }
    if (j.contains("dist")) c.sampling.distribution = parse_distribution(j["dist"].get<std::string>());
    if (j.contains("distribution")) {
      c.sampling.distribution = parse_distribution(j["distribution"].get<std::string>());
    }
    if (j.contains("n")) c.sampling.n_samples = j["n"].get<std::size_t>();
    if (j.contains("n_samples")) c.sampling.n_samples = j["n_samples"].get<std::size_t>();
    if (j.contains("scale_factor")) c.sampling.scale_factor = j["scale_factor"].get<double>();
    if (j.contains("dof")) c.sampling.dof = j["dof"].get<double>();
    if (j.contains("include_baseline")) c.sampling.include_baseline = j["include_baseline"].get<bool>();
    if (j.contains("renormalize_empty_scales")) {
      c.renormalize_empty_scales = j["renormalize_empty_scales"].get<bool>();
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("runs")) c.runs = j["runs"].get<std::size_t>();
    if (j.contains("max_test")) c.max_test = j["max_test"].get<std::size_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<std::size_t>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("bad config value: ") + e.what());
  }
  return c;
}

std::string canonical_config_json(const EngineConfig& c) {
  Json j;
  j["scales"] = c.scales;
  j["theta"] = c.theta;
  j["tau"] = c.temperature;
  j["mode"] = std::string(to_string(c.mode));
  j["weights"] = std::string(to_string(c.weight_source));
  if (c.weight_source == WeightSource::kFixed) j["fixed_weights"] = c.fixed_weights;
  j["distribution"] = std::string(to_string(c.sampling.distribution));
  j["n_samples"] = c.sampling.n_samples;
  j["scale_factor"] = c.sampling.scale_factor;
  j["dof"] = c.sampling.dof;
  j["include_baseline"] = c.sampling.include_baseline;
  j["renormalize_empty_scales"] = c.renormalize_empty_scales;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["max_test"] = c.max_test;
  return j.dump();
}

std::string config_hash(const EngineConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config_json(config))));
  return buf;
}

}  // namespace anomem
