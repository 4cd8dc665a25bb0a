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
#include <map>
#include <string>

#include "anomem/text.hpp"
#include "json_util.hpp"

namespace anomem {
using detail::Json;

EvalReport assemble_report(std::vector<TaskResult> results, const EngineConfig& config,
                           std::vector<std::pair<std::string, std::string>> skipped) {
  EvalReport report;
  report.config_hash = config_hash(config);
  report.config_json = canonical_config_json(config);
  report.skipped = std::move(skipped);

  std::map<std::string, std::vector<TaskResult>> by_class;
  for (auto& r : results) by_class[r.class_name].push_back(std::move(r));
  std::vector<double> class_means;
  for (auto& [name, runs] : by_class) {
    std::sort(runs.begin(), runs.end(),
              [](const TaskResult& a, const TaskResult& b) { return a.run_index < b.run_index; });
    std::vector<double> aurocs;
    for (const auto& r : runs) aurocs.push_back(r.auroc);
    ClassReport c{name, config.mode, aggregate_runs(aurocs), std::move(runs)};
    class_means.push_back(c.summary.mean);
    report.classes.push_back(std::move(c));
  }
  if (!class_means.empty()) report.mean = aggregate_runs(class_means);
  return report;
}

namespace {

Json weights_json(const ClassReport& c) {
  Json w = Json::array();
  for (const auto& r : c.runs) {
    w.push_back(std::vector<double>(r.weights.values().begin(), r.weights.values().end()));
  }
  return w;
}

std::size_t total_runs(const EvalReport& report) {
  std::size_t n = 0;
  for (const auto& c : report.classes) n += c.runs.size();
  return n;
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::string out = "class,mode,mean_auroc,ci_half_width,n_runs,weights_json\n";
  for (const auto& c : report.classes) {
    out += csv_field(c.class_name) + "," + std::string(to_string(c.mode)) + "," +
           format_double(c.summary.mean) + "," + format_double(c.summary.half_width) + "," +
           std::to_string(c.summary.n) + "," + csv_field(weights_json(c).dump()) + "\n";
  }
  const std::string mode =
      report.classes.empty() ? "" : std::string(to_string(report.classes.front().mode));
  out += "mean," + mode + "," + format_double(report.mean.mean) + "," +
         format_double(report.mean.half_width) + "," + std::to_string(total_runs(report)) + ",\n";
  return out;
}

std::string report_json(const EvalReport& report) {
  Json j;
  j["config_hash"] = report.config_hash;
  j["config"] = Json::parse(report.config_json);
  Json classes = Json::array();
  for (const auto& c : report.classes) {
    Json runs = Json::array();
    for (const auto& r : c.runs) {
      Json images = Json::array();
      for (std::size_t i = 0; i < r.image_ids.size(); ++i) {
        const auto comp = r.score_vectors[i].components();
        images.push_back({{"image_id", r.image_ids[i]},
                          {"label", r.labels[i]},
                          {"score", r.scores[i]},
                          {"components", std::vector<double>(comp.begin(), comp.end())}});
      }
      Json run{{"run_index", r.run_index},
               {"seed", r.seed},
               {"train_id", r.train_id},
               {"normal_id", r.normal_id},
               {"auroc", r.auroc},
               {"weights", std::vector<double>(r.weights.values().begin(), r.weights.values().end())},
               {"n_test", r.image_ids.size()},
               {"images", std::move(images)}};
      run["validation_auroc"] = r.validation_auroc ? Json(*r.validation_auroc) : Json(nullptr);
      runs.push_back(std::move(run));
    }
    classes.push_back({{"class", c.class_name},
                       {"mode", std::string(to_string(c.mode))},
                       {"mean_auroc", c.summary.mean},
                       {"ci_half_width", c.summary.half_width},
                       {"n_runs", c.summary.n},
                       {"runs", std::move(runs)}});
  }
  j["classes"] = std::move(classes);
  j["mean"] = {{"mean_auroc", report.mean.mean},
               {"ci_half_width", report.mean.half_width},
               {"n_classes", report.mean.n},
               {"n_runs", total_runs(report)}};
  Json skipped = Json::array();
  for (const auto& [cls, why] : report.skipped) skipped.push_back({{"class", cls}, {"reason", why}});
  j["skipped"] = std::move(skipped);
  return detail::dump(j);
}

}  // namespace anomem
