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

#include "anomem/dataset.hpp"

#include <algorithm>
#include <string>

#include "anomem/error.hpp"
#include "anomem/tensor_io.hpp"
#include "json_util.hpp"

namespace anomem {
namespace fs = std::filesystem;
using detail::Json;

namespace {

fs::path resolve(const fs::path& root, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (root / path).lexically_normal();
}

std::string relative_to(const fs::path& p, const fs::path& root) {
  const fs::path rel = p.lexically_relative(root);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

SampleRef parse_sample(const Json& j, const fs::path& root, const std::string& what) {
  if (!j.is_object()) throw Error(ErrorKind::kFormat, what + ": sample entries must be objects");
  SampleRef s;
  s.bundle_path = resolve(root, detail::required<std::string>(j, "bundle_path", what));
  const int label = detail::required<int>(j, "label", what);
  if (label != 0 && label != 1) throw Error(ErrorKind::kFormat, what + ": label must be 0 or 1");
  s.label = static_cast<Label>(label);
  if (auto m = j.find("mask_path"); m != j.end() && !m->is_null()) {
    s.mask_path = resolve(root, m->get<std::string>());
  }
  for (const auto& a : detail::optional_or<std::vector<std::string>>(j, "augmented", {}, what)) {
    s.augmented.push_back(resolve(root, a));
  }
  return s;
}

}  // namespace

const ClassSamples& DatasetManifest::at(const std::string& class_name) const {
  for (const auto& c : classes) {
    if (c.name == class_name) return c;
  }
  throw Error(ErrorKind::kInvalidArgument, "dataset has no class '" + class_name + "'");
}

DatasetManifest read_dataset_manifest(const fs::path& path) {
  const std::string what = path.string();
  const Json j = detail::parse_json(read_text_file(path), what);
  if (!j.is_object() || j.empty()) {
    throw Error(ErrorKind::kFormat, what + ": manifest must map class names to samples");
  }
  DatasetManifest m;
  m.root = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      ClassSamples c;
      c.name = it.key();
      const std::string cwhat = what + " [" + c.name + "]";
      const Json* list = nullptr;
      if (it->is_array()) {
        list = &*it;
        c.text_states = (m.root / "text_states" / (c.name + ".aeb")).lexically_normal();
      } else if (it->is_object()) {
        c.text_states = resolve(m.root, detail::required<std::string>(*it, "text_states", cwhat));
        const auto s = it->find("samples");
        if (s == it->end() || !s->is_array()) {
          throw Error(ErrorKind::kFormat, cwhat + ": 'samples' must be an array");
        }
        list = &*s;
      } else {
        throw Error(ErrorKind::kFormat, cwhat + ": expected a sample list or an object");
      }
      for (const Json& e : *list) c.samples.push_back(parse_sample(e, m.root, cwhat));
      m.classes.push_back(std::move(c));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, what + ": " + e.what());
  }
  std::sort(m.classes.begin(), m.classes.end(),
            [](const ClassSamples& a, const ClassSamples& b) { return a.name < b.name; });
  return m;
}

void write_dataset_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const fs::path root = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  Json j = Json::object();
  for (const auto& c : manifest.classes) {
    Json samples = Json::array();
    for (const auto& s : c.samples) {
      Json e{{"bundle_path", relative_to(s.bundle_path, root)}, {"label", static_cast<int>(s.label)}};
      if (s.mask_path) e["mask_path"] = relative_to(*s.mask_path, root);
      if (!s.augmented.empty()) {
        Json aug = Json::array();
        for (const auto& a : s.augmented) aug.push_back(relative_to(a, root));
        e["augmented"] = std::move(aug);
      }
      samples.push_back(std::move(e));
    }
    j[c.name] = Json{{"text_states", relative_to(c.text_states, root)}, {"samples", std::move(samples)}};
  }
  write_text_file(path, detail::dump(j));
}

}  // namespace anomem
