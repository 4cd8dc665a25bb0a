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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "anomem/bundle.hpp"

namespace anomem {

struct SampleRef {
  std::filesystem::path bundle_path;
  Label label = Label::kNormal;
  std::optional<std::filesystem::path> mask_path;
  // Augmented copies of the image, used only when the sample serves the
  // validation set.
  std::vector<std::filesystem::path> augmented;
};

struct ClassSamples {
  std::string name;
  std::filesystem::path text_states;
  std::vector<SampleRef> samples;
};

// Dataset manifest (UTF-8 JSON). Top level maps class name to either
//   [ {"bundle_path": ..., "label": 0|1, "mask_path": ..., "augmented": [...]}, ... ]
// in which case text states are read from "text_states/<class>.aeb", or
//   {"text_states": ..., "samples": [ ... ]}.
// Relative paths resolve against the manifest's directory. Classes are kept
// sorted by name.
struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ClassSamples> classes;

  const ClassSamples& at(const std::string& class_name) const;
};

DatasetManifest read_dataset_manifest(const std::filesystem::path& path);
// Writes the object form with paths relative to the manifest directory when
// they live under it.
void write_dataset_manifest(const DatasetManifest& manifest,
                            const std::filesystem::path& path);

}  // namespace anomem
