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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anomem/bundle.hpp"
#include "anomem/mask.hpp"

namespace anomem {

enum class PatchLabel { kNormal, kAnomalous, kExcluded };
enum class BankRole { kReference, kAnomalous };

inline constexpr double kDefaultCoverageThreshold = 0.25;

// Labels every window of `layout` from the mask coverage fraction c inside
// it: Normal when c == 0, Anomalous when c >= theta, Excluded otherwise.
// Throws kGeometry if any window leaves the image, kDimensionMismatch if the
// mask size differs from the image size.
std::vector<PatchLabel> assign_patch_labels(const AnnotationMask& mask,
                                            const WindowLayout& layout,
                                            int image_width, int image_height,
                                            double theta);

struct Provenance {
  std::string image_id;
  int row = 0;
  int col = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Flat store of unit embeddings for one scale.
class BankScale {
 public:
  BankScale(int scale_px, std::size_t dim) : scale_px_(scale_px), dim_(dim) {}

  int scale_px() const noexcept { return scale_px_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return provenance_.size(); }
  bool empty() const noexcept { return provenance_.empty(); }

  std::span<const float> entry(std::size_t i) const {
    return std::span<const float>(data_).subspan(i * dim_, dim_);
  }
  std::span<const float> data() const noexcept { return data_; }
  const Provenance& provenance(std::size_t i) const { return provenance_[i]; }
  const std::vector<Provenance>& provenance() const noexcept { return provenance_; }

  // Copies and re-normalizes if needed. Throws kDimensionMismatch/kNormalization.
  void append(std::span<const float> embedding, Provenance provenance);

 private:
  int scale_px_;
  std::size_t dim_;
  std::vector<float> data_;
  std::vector<Provenance> provenance_;
};

// Per-scale patch memory. Banks are filled by the builders below and then
// only read; concurrent queries on a const bank are safe.
class MemoryBank {
 public:
  MemoryBank(BankRole role, std::span<const int> scales, std::size_t dim);

  BankRole role() const noexcept { return role_; }
  std::size_t dim() const noexcept { return dim_; }
  std::vector<int> scales() const;
  const std::vector<BankScale>& per_scale() const noexcept { return scales_; }

  // Throws kScaleMismatch when the scale is not part of the bank.
  const BankScale& at_scale(int scale_px) const;
  BankScale& at_scale(int scale_px);

  void add(int scale_px, std::span<const float> embedding, Provenance provenance) {
    at_scale(scale_px).append(embedding, std::move(provenance));
  }

  std::size_t total_entries() const noexcept;

 private:
  BankRole role_;
  std::size_t dim_;
  std::vector<BankScale> scales_;
};

struct TrainingSample {
  EmbeddingBundle bundle;
  std::optional<AnnotationMask> mask;  // absent: the image is fully normal
};

// Stores every Normal-labelled patch. Throws kEmptyBank if some scale ends
// up with no entry.
MemoryBank build_reference_bank(std::span<const TrainingSample> samples,
                                double theta = kDefaultCoverageThreshold);

// Stores every Anomalous-labelled patch; scales where nothing qualifies stay
// empty. Throws kNoAnomalousPixels if no sample has a nonempty mask.
MemoryBank build_anomalous_bank(std::span<const TrainingSample> samples,
                                double theta = kDefaultCoverageThreshold);

struct Top1 {
  double similarity = -1.0;
  std::size_t index = 0;

  friend bool operator==(const Top1&, const Top1&) = default;
};

// Exact nearest entry by clamped cosine, ties to the lowest index.
// Throws kEmptyScale on an empty scale, kDimensionMismatch on dim mismatch.
Top1 top1_similarity(std::span<const float> query, const BankScale& bank);
Top1 top1_similarity(std::span<const float> query, const MemoryBank& bank,
                     int scale_px);

// Blocked, optionally multithreaded search over `queries` (n x dim,
// row-major). Results are identical to calling top1_similarity per query.
std::vector<Top1> top1_batch(std::span<const float> queries, const BankScale& bank,
                             std::size_t threads = 1);

// Bank cache: DIR/bank.json plus one AEB1 tensor (entries x dim) per scale.
void save_bank(const MemoryBank& bank, const std::filesystem::path& dir);
MemoryBank load_bank(const std::filesystem::path& dir);

}  // namespace anomem
