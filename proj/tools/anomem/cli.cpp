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

#include "anomem/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "anomem/bundle.hpp"
#include "anomem/config.hpp"
#include "anomem/dataset.hpp"
#include "anomem/error.hpp"
#include "anomem/eval.hpp"
#include "anomem/memory.hpp"
#include "anomem/parallel.hpp"
#include "anomem/scoring.hpp"
#include "anomem/tensor_io.hpp"
#include "anomem/text.hpp"
#include "anomem/weights.hpp"
#include "json.hpp"

namespace anomem::cli {
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<double> parse_weight_values(const std::string& text, const std::string& what) {
  Json j;
  try {
    j = Json::parse(text);
    if (j.is_object()) j = j.at("weights");
    return j.get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, what + ": expected a JSON array of weights or {\"weights\": [...]}");
  }
}

WeightVector load_weights_file(const fs::path& path, std::size_t n_scales) {
  auto values = parse_weight_values(read_text_file(path), path.string());
  if (values.size() != 1 + 2 * n_scales) {
    throw Error(ErrorKind::kDimensionMismatch,
                path.string() + ": holds " + std::to_string(values.size()) + " weights, expected " +
                    std::to_string(1 + 2 * n_scales));
  }
  return WeightVector(std::move(values));
}

// Loads DIR/reference and DIR/anomalous.
struct Banks {
  MemoryBank reference;
  MemoryBank anomalous;
};

Banks load_banks(const fs::path& dir) {
  Banks b{load_bank(dir / "reference"), load_bank(dir / "anomalous")};
  if (b.reference.role() != BankRole::kReference || b.anomalous.role() != BankRole::kAnomalous) {
    throw Error(ErrorKind::kFormat, dir.string() + ": bank roles are swapped");
  }
  if (b.reference.scales() != b.anomalous.scales()) {
    throw Error(ErrorKind::kScaleMismatch, dir.string() + ": reference and anomalous scales differ");
  }
  return b;
}

// The sample whose image_id or bundle path equals `id`.
const SampleRef& find_sample(const DatasetManifest& manifest, const std::string& class_name,
                             const std::string& id) {
  const ClassSamples& c = manifest.at(class_name);
  for (const SampleRef& s : c.samples) {
    if (s.bundle_path.generic_string() == id || s.bundle_path.filename() == id) return s;
  }
  for (const SampleRef& s : c.samples) {
    if (read_bundle(s.bundle_path).image_id == id) return s;
  }
  throw Error(ErrorKind::kInvalidArgument, "class '" + class_name + "' has no sample '" + id + "'");
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "--theta must lie in [0, 1]");
  }
}

std::string score_header(std::size_t n_scales) {
  std::string h = "image_id,a_zs";
  for (std::size_t s = 1; s <= n_scales; ++s) h += ",a_n" + std::to_string(s);
  for (std::size_t s = 1; s <= n_scales; ++s) h += ",a_p" + std::to_string(s);
  return h + ",aggregate\n";
}

EngineConfig load_config(const std::string& config_path) {
  EngineConfig config;
  if (!config_path.empty()) config = merge_config_json(config, read_text_file(config_path));
  return config;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string bundle;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  const EmbeddingBundle b = read_bundle(a.bundle);
  Json grids = Json::array();
  for (const auto& g : b.grids) {
    grids.push_back({{"scale_px", g.scale_px()},
                     {"rows", g.layout.rows},
                     {"cols", g.layout.cols},
                     {"stride", {g.layout.stride_y, g.layout.stride_x}},
                     {"offset", {g.layout.offset_y, g.layout.offset_x}}});
  }
  Json j{{"image_id", b.image_id},
         {"class_name", b.class_name},
         {"image_width", b.image_width},
         {"image_height", b.image_height},
         {"embedding_dim", b.dim()},
         {"grids", std::move(grids)}};
  j["label"] = b.label ? Json(static_cast<int>(*b.label)) : Json(nullptr);
  out << j.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- build

struct BuildArgs {
  std::string manifest;
  std::string class_name;
  std::vector<std::string> train_ids;
  std::string out;
  double theta = kDefaultCoverageThreshold;
};

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  check_theta(a.theta);
  const DatasetManifest manifest = read_dataset_manifest(a.manifest);
  std::vector<TrainingSample> samples;
  for (const auto& id : a.train_ids) {
    const SampleRef& ref = find_sample(manifest, a.class_name, id);
    TrainingSample s{read_bundle(ref.bundle_path), std::nullopt};
    if (ref.mask_path) {
      s.mask = read_mask(*ref.mask_path, s.bundle.image_width, s.bundle.image_height);
    } else if (ref.label == Label::kAnomalous) {
      throw Error(ErrorKind::kInvalidArgument, "anomalous training sample '" + id + "' has no mask");
    }
    samples.push_back(std::move(s));
  }
  const MemoryBank reference = build_reference_bank(samples, a.theta);
  const bool any_mask = std::any_of(samples.begin(), samples.end(),
                                    [](const TrainingSample& s) { return s.mask && !s.mask->empty(); });
  const MemoryBank anomalous = any_mask
                                   ? build_anomalous_bank(samples, a.theta)
                                   : MemoryBank(BankRole::kAnomalous, reference.scales(), reference.dim());
  if (!any_mask) err << "note: no anomalous pixels in the training samples; anomalous bank is empty\n";

  const fs::path dir(a.out);
  ensure_dir(dir);
  save_bank(reference, dir / "reference");
  save_bank(anomalous, dir / "anomalous");

  Json counts = Json::array();
  for (std::size_t i = 0; i < reference.per_scale().size(); ++i) {
    counts.push_back({{"scale_px", reference.per_scale()[i].scale_px()},
                      {"reference_entries", reference.per_scale()[i].size()},
                      {"anomalous_entries", anomalous.per_scale()[i].size()}});
  }
  Json report{{"class", a.class_name}, {"train_ids", a.train_ids}, {"theta", a.theta}, {"scales", counts}};
  const std::string text = report.dump(2) + "\n";
  write_text_file(dir / "build_report.json", text);
  out << text;
  return kOk;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string banks;
  std::vector<std::string> bundles;
  std::string text_states;
  std::string weights = "baseline";
  double tau = kDefaultTemperature;
  bool renormalize = false;
  std::size_t threads = 0;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const Banks banks = load_banks(a.banks);
  const TextStatePair states = read_text_states(a.text_states);
  const std::size_t n_scales = banks.reference.scales().size();
  WeightVector weights;
  if (a.weights == "baseline") {
    weights = baseline_weights(n_scales);
  } else if (a.weights == "winclip-compat") {
    weights = winclip_compat_weights(n_scales);
  } else {
    weights = load_weights_file(a.weights, n_scales);
  }
  const ScoringOptions options{a.tau, resolve_threads(a.threads)};
  std::string csv = score_header(n_scales);
  for (const auto& path : a.bundles) {
    const EmbeddingBundle b = read_bundle(path);
    const ScoreVector sv = score_vector(b, banks.reference, banks.anomalous, states, options);
    csv += csv_field(b.image_id);
    for (double c : sv.components()) csv += "," + format_double(c);
    csv += "," + format_double(aggregate(sv, weights, a.renormalize)) + "\n";
  }
  out << csv;
  return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string banks;
  std::vector<std::string> val_bundles;
  std::string text_states;
  std::string dist = "uniform";
  std::size_t n = 100;
  std::uint64_t seed = 0;
  bool no_baseline = false;
  double scale_factor = 0.5;
  double dof = 3.0;
  double tau = kDefaultTemperature;
  bool renormalize = false;
  std::string out = ".";
  std::size_t threads = 0;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const Banks banks = load_banks(a.banks);
  const TextStatePair states = read_text_states(a.text_states);
  SamplingSpec spec;
  spec.distribution = parse_distribution(a.dist);
  spec.n_samples = a.n;
  spec.seed = a.seed;
  spec.include_baseline = !a.no_baseline;
  spec.scale_factor = a.scale_factor;
  spec.dof = a.dof;
  spec.validate();

  const std::size_t threads = resolve_threads(a.threads);
  ValidationSet val;
  for (const auto& path : a.val_bundles) {
    const EmbeddingBundle b = read_bundle(path);
    if (!b.label) throw Error(ErrorKind::kInvalidArgument, path + ": validation bundle has no label");
    val.scores.push_back(score_vector(b, banks.reference, banks.anomalous, states, {a.tau, threads}));
    val.labels.push_back(static_cast<int>(*b.label));
  }
  const SearchResult r = monte_carlo_search(val, spec, {threads, a.renormalize});
  const TraceRow& best = r.trace[r.best_index];
  Json j{{"weights", std::vector<double>(r.best_weights.values().begin(), r.best_weights.values().end())},
         {"val_auroc", r.best_auroc},
         {"candidate_index", r.best_index},
         {"baseline", best.baseline},
         {"distribution", std::string(to_string(spec.distribution))},
         {"n_samples", spec.n_samples},
         {"include_baseline", spec.include_baseline},
         {"seed", spec.seed}};
  const std::string text = j.dump(2) + "\n";
  const fs::path dir(a.out);
  ensure_dir(dir);
  write_text_file(dir / "weights.json", text);
  write_text_file(dir / "trace.csv", trace_csv(r));
  out << text;
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string manifest;
  std::string config;
  std::string out = "report";
};

int cmd_eval(const EvalArgs& a, EngineConfig config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const DatasetManifest manifest = read_dataset_manifest(a.manifest);
  const EvalReport report = run_evaluation(manifest, config);
  for (const auto& [cls, why] : report.skipped) err << "skipped class '" << cls << "': " << why << "\n";

  const fs::path dir(a.out);
  ensure_dir(dir);
  const std::string csv = report_csv(report);
  write_text_file(dir / "report.csv", csv);
  write_text_file(dir / "report.json", report_json(report));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream log;
  log << "finished_at " << timestamp() << "\n"
      << "config_hash " << report.config_hash << "\n"
      << "threads " << resolve_threads(config.threads) << "\n"
      << "elapsed_s " << seconds << "\n";
  write_text_file(dir / "run.log", log.str());
  out << csv;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"anomem: few-shot anomaly scoring with normal and anomalous patch memories"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print the manifest summary of an embedding bundle");
  inspect_cmd->add_option("--bundle", inspect.bundle, "Bundle directory")->required();

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Build reference and anomalous memory banks");
  build_cmd->add_option("--manifest", build.manifest, "Dataset manifest JSON")->required();
  build_cmd->add_option("--class", build.class_name, "Class name")->required();
  build_cmd->add_option("--train-id", build.train_ids, "Training image id or bundle path (repeatable)")
      ->required();
  build_cmd->add_option("--out", build.out, "Output directory")->required();
  build_cmd->add_option("--theta", build.theta, "Anomalous coverage threshold in [0, 1]");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score bundles against cached banks");
  score_cmd->add_option("--banks", score.banks, "Bank directory from `build`")->required();
  score_cmd->add_option("--bundles", score.bundles, "Bundle directories")->required();
  score_cmd->add_option("--text-states", score.text_states, "Text states tensor")->required();
  score_cmd->add_option("--weights", score.weights, "baseline, winclip-compat or a weights JSON file");
  score_cmd->add_option("--tau", score.tau, "Softmax temperature");
  score_cmd->add_flag("--renormalize-empty", score.renormalize,
                      "Spread weight of empty anomalous scales over nonempty ones");
  score_cmd->add_option("--threads", score.threads, "Worker threads (0 = auto)");

  ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Monte-Carlo weight search on labelled bundles");
  validate_cmd->add_option("--banks", validate.banks, "Bank directory from `build`")->required();
  validate_cmd->add_option("--val-bundles", validate.val_bundles, "Labelled validation bundles")->required();
  validate_cmd->add_option("--text-states", validate.text_states, "Text states tensor")->required();
  validate_cmd->add_option("--dist", validate.dist, "uniform, normal or student-t");
  validate_cmd->add_option("--n", validate.n, "Number of sampled candidates");
  validate_cmd->add_option("--seed", validate.seed, "Sampling seed");
  validate_cmd->add_flag("--no-baseline", validate.no_baseline, "Do not include the baseline weights");
  validate_cmd->add_option("--scale-factor", validate.scale_factor, "Normal/Student-t relative scale");
  validate_cmd->add_option("--dof", validate.dof, "Student-t degrees of freedom");
  validate_cmd->add_option("--tau", validate.tau, "Softmax temperature");
  validate_cmd->add_flag("--renormalize-empty", validate.renormalize,
                         "Spread weight of empty anomalous scales over nonempty ones");
  validate_cmd->add_option("--out", validate.out, "Directory for weights.json and trace.csv");
  validate_cmd->add_option("--threads", validate.threads, "Worker threads (0 = auto)");

  EvalArgs eval;
  std::size_t runs = 0, max_test = 0, n = 0, threads = 0;
  std::uint64_t seed = 0;
  double theta = 0, tau = 0;
  std::string mode, weights, dist;
  bool renormalize = false, no_baseline = false;
  auto* eval_cmd = app.add_subcommand("eval", "Run the few-shot evaluation protocol");
  eval_cmd->add_option("--manifest", eval.manifest, "Dataset manifest JSON")->required();
  eval_cmd->add_option("--config", eval.config, "Engine config JSON (flags take precedence)");
  eval_cmd->add_option("--out", eval.out, "Report directory");
  auto* o_runs = eval_cmd->add_option("--runs", runs, "Runs per class");
  auto* o_max = eval_cmd->add_option("--max-test", max_test, "Maximum test images per task");
  auto* o_seed = eval_cmd->add_option("--seed", seed, "Task split and sampling seed");
  auto* o_mode = eval_cmd->add_option("--mode", mode, "composite or winclip-compat");
  auto* o_weights = eval_cmd->add_option("--weights", weights, "baseline, validated, oracle or a weights JSON file");
  auto* o_theta = eval_cmd->add_option("--theta", theta, "Anomalous coverage threshold");
  auto* o_tau = eval_cmd->add_option("--tau", tau, "Softmax temperature");
  auto* o_dist = eval_cmd->add_option("--dist", dist, "Candidate distribution for validated/oracle weights");
  auto* o_n = eval_cmd->add_option("--n", n, "Candidates for validated/oracle weights");
  auto* o_threads = eval_cmd->add_option("--threads", threads, "Worker threads (0 = auto)");
  auto* o_renorm = eval_cmd->add_flag("--renormalize-empty", renormalize, "Renormalize empty anomalous scales");
  auto* o_nobase = eval_cmd->add_flag("--no-baseline", no_baseline, "Exclude baseline from candidates");

  std::vector<const char*> argv{"anomem"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*inspect_cmd) return cmd_inspect(inspect, out);
    if (*build_cmd) return cmd_build(build, out, err);
    if (*score_cmd) return cmd_score(score, out);
    if (*validate_cmd) return cmd_validate(validate, out);
    if (*eval_cmd) {
      EngineConfig config = load_config(eval.config);
      if (*o_runs) config.runs = runs;
      if (*o_max) config.max_test = max_test;
      if (*o_seed) config.seed = seed;
      if (*o_mode) config.mode = parse_scoring_mode(mode);
      if (*o_theta) config.theta = theta;
      if (*o_tau) config.temperature = tau;
      if (*o_dist) config.sampling.distribution = parse_distribution(dist);
      if (*o_n) config.sampling.n_samples = n;
      if (*o_threads) config.threads = threads;
      if (*o_renorm) config.renormalize_empty_scales = renormalize;
      if (*o_nobase) config.sampling.include_baseline = !no_baseline;
      if (*o_weights) {
        if (weights == "baseline" || weights == "validated" || weights == "oracle") {
          config.weight_source = parse_weight_source(weights);
        } else {
          config.weight_source = WeightSource::kFixed;
          config.fixed_weights = parse_weight_values(read_text_file(weights), weights);
        }
      }
      return cmd_eval(eval, config, out, err);
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kInputError : kInternalError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInputError;
}

}  // namespace anomem::cli
