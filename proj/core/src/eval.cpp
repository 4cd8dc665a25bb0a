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

#include "anomem/eval.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anomem/error.hpp"
#include "anomem/mask.hpp"
#include "anomem/memory.hpp"
#include "anomem/parallel.hpp"
#include "anomem/rng.hpp"
#include "anomem/weights.hpp"

namespace anomem {

namespace {

// Takes up to `limit` of the shuffled positives and negatives, keeping the
// class ratio and at least one of each.
std::vector<std::size_t> stratified_take(const std::vector<std::size_t>& pos,
                                         const std::vector<std::size_t>& neg, std::size_t limit) {
  std::size_t n_pos = pos.size(), n_neg = neg.size();
  if (n_pos + n_neg > limit) {
    const double share = static_cast<double>(pos.size()) / static_cast<double>(pos.size() + neg.size());
    n_pos = static_cast<std::size_t>(std::llround(share * static_cast<double>(limit)));
    n_pos = std::clamp<std::size_t>(n_pos, 1, std::min(pos.size(), limit - 1));
    n_neg = std::min(neg.size(), limit - n_pos);
    n_pos = std::min(pos.size(), limit - n_neg);
  }
  std::vector<std::size_t> out(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(n_pos));
  out.insert(out.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(n_neg));
  std::sort(out.begin(), out.end());
  return out;
}

EmbeddingBundle load_checked(const SampleRef& ref, const EngineConfig& config) {
  EmbeddingBundle b = read_bundle(ref.bundle_path);
  if (b.scales() != config.scales) {
    throw Error(ErrorKind::kScaleMismatch, ref.bundle_path.string() + ": bundle scales differ from the configured scales");
  }
  if (b.label && *b.label != ref.label) {
    throw Error(ErrorKind::kIntegrity, ref.bundle_path.string() + ": bundle label disagrees with the dataset manifest");
  }
  return b;
}

TrainingSample load_training(const SampleRef& ref, const EngineConfig& config, bool need_mask) {
  TrainingSample s{load_checked(ref, config), std::nullopt};
  if (ref.mask_path) {
    s.mask = read_mask(*ref.mask_path, s.bundle.image_width, s.bundle.image_height);
  } else if (need_mask) {
    throw Error(ErrorKind::kInsufficientData, "training sample '" + s.bundle.image_id + "' has no mask");
  }
  return s;
}

// Augmented copies when listed, else the sample itself.
void add_validation_images(const SampleRef& ref, int label, const EngineConfig& config,
                           const MemoryBank& reference, const MemoryBank& anomalous,
                           const TextStatePair& states, ValidationSet& val) {
  std::vector<std::filesystem::path> paths = ref.augmented;
  if (paths.empty()) paths.push_back(ref.bundle_path);
  for (const auto& p : paths) {
    SampleRef copy = ref;
    copy.bundle_path = p;
    const EmbeddingBundle b = load_checked(copy, config);
    val.scores.push_back(score_vector(b, reference, anomalous, states, {config.temperature, 1}));
    val.labels.push_back(label);
  }
}

}  // namespace

std::vector<TaskSpec> build_class_tasks(const ClassSamples& samples, const TaskOptions& options) {
  if (options.runs_per_class == 0) throw Error(ErrorKind::kInvalidArgument, "runs_per_class must be >= 1");
  if (options.max_test < 2) throw Error(ErrorKind::kInvalidArgument, "max_test must be >= 2");
  std::vector<std::size_t> masked, anomalous, normal;
  for (std::size_t i = 0; i < samples.samples.size(); ++i) {
    const SampleRef& s = samples.samples[i];
    if (s.label == Label::kAnomalous) {
      anomalous.push_back(i);
      if (s.mask_path) masked.push_back(i);
    } else {
      normal.push_back(i);
    }
  }
  const std::string cls = "class '" + samples.name + "'";
  if (masked.empty() && options.mode == ScoringMode::kComposite) {
    throw Error(ErrorKind::kInsufficientData, cls + " has no anomalous sample with a mask");
  }
  if (normal.empty()) throw Error(ErrorKind::kInsufficientData, cls + " has no normal sample");

  RngStream rng = RngStream(options.seed, "task-split").substream(fnv1a64(samples.name));
  rng.shuffle(std::span(masked));

  std::vector<TaskSpec> tasks;
  for (std::size_t r = 0; r < options.runs_per_class; ++r) {
    RngStream run_rng = rng.substream(r);
    TaskSpec t;
    t.class_name = samples.name;
    t.run_index = r;
    t.text_states = samples.text_states;
    t.mode = options.mode;
    t.weight_source = options.weight_source;

    std::optional<std::size_t> train;
    if (!masked.empty()) train = masked[r % masked.size()];
    const std::size_t normal_pick = normal[run_rng.uniform_index(normal.size())];
    if (train) t.anomalous_train = samples.samples[*train];
    t.normal_sample = samples.samples[normal_pick];

    std::vector<std::size_t> pos, neg;
    for (std::size_t i : anomalous) {
      if (!train || i != *train) pos.push_back(i);
    }
    for (std::size_t i : normal) {
      if (i != normal_pick) neg.push_back(i);
    }
    if (pos.empty() || neg.empty()) {
      throw Error(ErrorKind::kInsufficientData,
                  cls + " leaves no " + std::string(pos.empty() ? "anomalous" : "normal") +
                      " test sample after the training draw");
    }
    run_rng.shuffle(std::span(pos));
    run_rng.shuffle(std::span(neg));
    for (std::size_t i : stratified_take(pos, neg, options.max_test)) t.test.push_back(samples.samples[i]);
    t.seed = run_rng.next_u64();
    tasks.push_back(std::move(t));
  }
  return tasks;
}

TaskPlan build_tasks(const DatasetManifest& manifest, const TaskOptions& options) {
  TaskPlan plan;
  for (const ClassSamples& c : manifest.classes) {
    try {
      auto tasks = build_class_tasks(c, options);
      plan.tasks.insert(plan.tasks.end(), std::make_move_iterator(tasks.begin()),
                        std::make_move_iterator(tasks.end()));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInsufficientData) throw;
      plan.skipped.emplace_back(c.name, e.what());
    }
  }
  return plan;
}

TaskResult run_task(const TaskSpec& task, const EngineConfig& config) {
  config.validate();
  const std::size_t n_scales = config.scales.size();
  const TextStatePair states = read_text_states(task.text_states);

  TaskResult result;
  result.class_name = task.class_name;
  result.run_index = task.run_index;
  result.seed = task.seed;
  result.config_hash = config_hash(config);

  std::vector<TrainingSample> training;
  if (task.mode == ScoringMode::kComposite) {
    if (!task.anomalous_train) {
      throw Error(ErrorKind::kInsufficientData, "composite mode needs a masked anomalous training sample");
    }
    training.push_back(load_training(*task.anomalous_train, config, true));
  } else if (task.normal_sample) {
    training.push_back(load_training(*task.normal_sample, config, false));
  } else if (task.anomalous_train) {
    training.push_back(load_training(*task.anomalous_train, config, false));
  } else {
    throw Error(ErrorKind::kInsufficientData, "task has no training sample");
  }
  const std::size_t dim = training.front().bundle.dim();
  const MemoryBank reference = build_reference_bank(training, config.theta);
  const MemoryBank anomalous = task.mode == ScoringMode::kComposite
                                   ? build_anomalous_bank(training, config.theta)
                                   : MemoryBank(BankRole::kAnomalous, config.scales, dim);
  if (task.anomalous_train) {
    result.train_id = task.mode == ScoringMode::kComposite ? training.front().bundle.image_id
                                                           : read_bundle(task.anomalous_train->bundle_path).image_id;
  }
  if (task.normal_sample) {
    result.normal_id = (task.mode == ScoringMode::kWinclipCompat) ? training.front().bundle.image_id
                                                                  : read_bundle(task.normal_sample->bundle_path).image_id;
  }

  const std::size_t n = task.test.size();
  result.image_ids.resize(n);
  result.labels.resize(n);
  result.score_vectors.resize(n);
  parallel_for(n, resolve_threads(config.threads), [&](std::size_t i) {
    const EmbeddingBundle b = load_checked(task.test[i], config);
    result.image_ids[i] = b.image_id;
    result.labels[i] = static_cast<int>(task.test[i].label);
    result.score_vectors[i] = score_vector(b, reference, anomalous, states, {config.temperature, 1});
  });

  SamplingSpec spec = config.sampling;
  spec.seed = task.seed;
  const SearchOptions search{1, config.renormalize_empty_scales};
  switch (config.weight_source) {
    case WeightSource::kBaseline:
      result.weights = mode_weights(task.mode, n_scales);
      break;
    case WeightSource::kFixed:
      result.weights = WeightVector(config.fixed_weights);
      break;
    case WeightSource::kValidated: {
      if (!task.anomalous_train || !task.normal_sample) {
        throw Error(ErrorKind::kDegenerateValidation, "validated weights need an anomalous and a normal training sample");
      }
      ValidationSet val;
      add_validation_images(*task.anomalous_train, 1, config, reference, anomalous, states, val);
      add_validation_images(*task.normal_sample, 0, config, reference, anomalous, states, val);
      const SearchResult found = monte_carlo_search(val, spec, search);
      result.weights = found.best_weights;
      result.validation_auroc = found.best_auroc;
      break;
    }
    case WeightSource::kOracle: {
      const ValidationSet val{result.score_vectors, result.labels};
      const SearchResult found = monte_carlo_search(val, spec, search);
      result.weights = found.best_weights;
      result.validation_auroc = found.best_auroc;
      break;
    }
  }

  result.scores.reserve(n);
  for (const auto& sv : result.score_vectors) {
    result.scores.push_back(aggregate(sv, result.weights, config.renormalize_empty_scales));
  }
  result.auroc = auroc(result.scores, result.labels);
  return result;
}

EvalReport run_evaluation(const DatasetManifest& manifest, const EngineConfig& config) {
  config.validate();
  const TaskOptions options{config.runs, config.max_test, config.seed, config.mode, config.weight_source};
  TaskPlan plan = build_tasks(manifest, options);
  if (plan.tasks.empty()) {
    std::string reasons;
    for (const auto& [cls, why] : plan.skipped) reasons += " " + why + ";";
    throw Error(ErrorKind::kInsufficientData, "no class yields a valid task:" + reasons);
  }
  EngineConfig inner = config;
  inner.threads = 1;
  std::vector<TaskResult> results(plan.tasks.size());
  parallel_for(plan.tasks.size(), resolve_threads(config.threads),
               [&](std::size_t i) { results[i] = run_task(plan.tasks[i], inner); });
  return assemble_report(std::move(results), config, std::move(plan.skipped));
}

}  // namespace anomem
