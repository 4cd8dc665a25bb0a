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
#include <vector>

namespace anomem {

// Binary pixel annotation, 1 = anomalous. Row-major, height x width.
class AnnotationMask {
 public:
  AnnotationMask() = default;
  AnnotationMask(int width, int height);
  AnnotationMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }
  // Sets every pixel of [x0, x0+w) x [y0, y0+h), clipped to the image.
  void fill_rect(int x0, int y0, int w, int h, bool value = true);

  std::size_t anomalous_count() const noexcept;
  bool empty() const noexcept { return anomalous_count() == 0; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  friend bool operator==(const AnnotationMask&, const AnnotationMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// Reads a PNG (converted to 8-bit gray) or an AEB1 uint8 tensor of shape
// (height, width). Any nonzero pixel is anomalous. Throws kDimensionMismatch
// when the size differs from the expectation and kIo when unreadable.
AnnotationMask read_mask(const std::filesystem::path& path, int expected_width,
                         int expected_height);

void write_mask_png(const AnnotationMask& mask, const std::filesystem::path& path);
void write_mask_tensor(const AnnotationMask& mask, const std::filesystem::path& path);

}  // namespace anomem
