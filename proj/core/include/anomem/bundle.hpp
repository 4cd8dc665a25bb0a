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
#include <vector>

#include "anomem/vector.hpp"

namespace anomem {

enum class Label : int { kNormal = 0, kAnomalous = 1 };

// Pixel placement of a grid of square windows. Window (r, c) covers rows
// [offset_y + r*stride_y, +scale_px) and columns [offset_x + c*stride_x,
// +scale_px) of the source image. Windows may overlap.
struct WindowLayout {
  int scale_px = 0;
  int rows = 0;
  int cols = 0;
  int stride_y = 0;
  int stride_x = 0;
  int offset_y = 0;
  int offset_x = 0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }

  // Non-overlapping windows starting at the image origin.
  static WindowLayout tiled(int scale_px, int rows, int cols);

  friend bool operator==(const WindowLayout&, const WindowLayout&) = default;
};

// rows x cols unit-normalized patch embeddings for one scale, row-major.
struct ScaleGrid {
  WindowLayout layout;
  std::size_t dim = 0;
  std::vector<float> data;

  int scale_px() const noexcept { return layout.scale_px; }
  std::size_t size() const noexcept { return layout.size(); }
  std::span<const float> patch(std::size_t index) const {
    return std::span<const float>(data).subspan(index * dim, dim);
  }
  std::span<const float> patch(int row, int col) const {
    return patch(static_cast<std::size_t>(row) * layout.cols + col);
  }

  friend bool operator==(const ScaleGrid&, const ScaleGrid&) = default;
};

struct EmbeddingBundle {
  std::string image_id;
  std::string class_name;
  int image_width = 0;
  int image_height = 0;
  FeatureVector global_embedding;
  std::vector<ScaleGrid> grids;  // strictly increasing scale_px
  std::optional<Label> label;

  std::size_t dim() const noexcept { return global_embedding.dim(); }
  std::vector<int> scales() const;
  // Throws kScaleMismatch if the scale is absent.
  const ScaleGrid& grid(int scale_px) const;

  // Throws on any broken invariant: empty or unordered scales, dimension
  // disagreement, data size, non-unit embeddings, non-positive image size.
  void validate() const;

  friend bool operator==(const EmbeddingBundle&, const EmbeddingBundle&) = default;
};

struct TextStatePair {
  FeatureVector normal;
  FeatureVector anomalous;
};

// Bundle directory: manifest.json plus one AEB1 tensor per embedding block.
// Stored vectors are re-normalized on load when their norm is off by more
// than 1e-6; exactly-unit float data passes through untouched so a
// write/read cycle is bit-exact.
EmbeddingBundle read_bundle(const std::filesystem::path& dir);
void write_bundle(const EmbeddingBundle& bundle, const std::filesystem::path& dir);

// Text states file: an AEB1 float32 tensor of shape (2, dim), row 0 the
// normal state and row 1 the anomalous state.
TextStatePair read_text_states(const std::filesystem::path& path);
void write_text_states(const TextStatePair& states, const std::filesystem::path& path);

// Re-normalizes `v` in place if |norm - 1| > 1e-6. Throws kNormalization for
// a zero vector.
void ensure_unit(std::span<float> v);

}  // namespace anomem
