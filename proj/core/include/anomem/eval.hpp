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
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anomem/auroc.hpp"
#include "anomem/config.hpp"
#include "anomem/dataset.hpp"
#include "anomem/scoring.hpp"

namespace anomem {

struct TaskSpec {
  std::string class_name;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::filesystem::path text_states;
  // Masked anomalous sample that fills both banks. May be absent only in
  // winclip-compat mode.
  std::optional<SampleRef> anomalous_train;
  // Normal sample: validation in composite mode, reference bank source in
  // winclip-compat mode.
  std::optional<SampleRef> normal_sample;
  std::vector<SampleRef> test;
  ScoringMode mode = ScoringMode::kComposite;
  WeightSource weight_source = WeightSource::kBaseline;
};

struct TaskOptions {
  std::size_t runs_per_class = 3;
  std::size_t max_test = 100;
  std::uint64_t seed = 0;
  ScoringMode mode = ScoringMode::kComposite;
  WeightSource weight_source = WeightSource::kBaseline;
};

// Tasks for one class. Masked anomalous samples are visited in a seeded
// random order (distinct across runs while they last), a normal sample is
// drawn uniformly per run, and up to max_test of the rest form the test set,
// stratified so both classes appear. Throws kInsufficientData when the class
// cannot yield a valid task.
std::vector<TaskSpec> build_class_tasks(const ClassSamples& samples,
                                        const TaskOptions& options);

struct TaskPlan {
  std::vector<TaskSpec> tasks;
  std::vector<std::pair<std::string, std::string>> skipped;  // class, reason
};

// All classes in name order; classes failing with kInsufficientData are
// recorded in `skipped`.
TaskPlan build_tasks(const DatasetManifest& manifest, const TaskOptions& options);

struct TaskResult {
  std::string class_name;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string train_id;
  std::string normal_id;
  std::vector<std::string> image_ids;
  std::vector<int> labels;
  std::vector<ScoreVector> score_vectors;
  std::vector<double> scores;
  WeightVector weights;
  std::optional<double> validation_auroc;
  double auroc = 0.0;
};

TaskResult run_task(const TaskSpec& task, const EngineConfig& config);

struct ClassReport {
  std::string class_name;
  ScoringMode mode = ScoringMode::kComposite;
  RunSummary summary;
  std::vector<TaskResult> runs;
};

struct EvalReport {
  std::string config_hash;
  std::string config_json;
  std::vector<ClassReport> classes;  // sorted by name
  RunSummary mean;                   // over class means
  std::vector<std::pair<std::string, std::string>> skipped;
};

// build_tasks + run_task for every task (in parallel) + assembly.
EvalReport run_evaluation(const DatasetManifest& manifest, const EngineConfig& config);

EvalReport assemble_report(std::vector<TaskResult> results, const EngineConfig& config,
                           std::vector<std::pair<std::string, std::string>> skipped);

// class,mode,mean_auroc,ci_half_width,n_runs,weights_json; last row "mean".
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);

}  // namespace anomem
