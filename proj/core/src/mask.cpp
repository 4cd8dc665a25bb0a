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

#include "anomem/mask.hpp"

#include <png.h>

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

#include "anomem/error.hpp"
#include "anomem/tensor_io.hpp"

namespace anomem {
namespace fs = std::filesystem;

AnnotationMask::AnnotationMask(int width, int height)
    : AnnotationMask(width, height,
                     std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                               static_cast<std::size_t>(std::max(height, 0)))) {}

AnnotationMask::AnnotationMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "mask dimensions must be positive");
  }
  if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::kIntegrity, "mask data does not match its dimensions");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

void AnnotationMask::fill_rect(int x0, int y0, int w, int h, bool value) {
  const int xa = std::max(x0, 0), xb = std::min(x0 + w, width_);
  const int ya = std::max(y0, 0), yb = std::min(y0 + h, height_);
  for (int y = ya; y < yb; ++y) {
    for (int x = xa; x < xb; ++x) set(x, y, value);
  }
}

std::size_t AnnotationMask::anomalous_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

bool has_png_signature(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

AnnotationMask decode_png(const std::vector<std::uint8_t>& bytes, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    throw Error(ErrorKind::kFormat, path.string() + ": " + msg);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::kFormat, path.string() + ": " + msg);
  }
  return AnnotationMask(static_cast<int>(image.width), static_cast<int>(image.height),
                        std::move(pixels));
}

}  // namespace

AnnotationMask read_mask(const fs::path& path, int expected_width, int expected_height) {
  const auto bytes = read_file_bytes(path);
  AnnotationMask mask;
  if (has_png_signature(bytes)) {
    mask = decode_png(bytes, path);
  } else {
    ByteTensor t;
    try {
      t = decode_byte_tensor(bytes);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ": not a PNG or AEB1 uint8 mask (" +
                                      std::string(e.what()) + ")");
    }
    if (t.shape.size() != 2 || t.shape[0] == 0 || t.shape[1] == 0) {
      throw Error(ErrorKind::kFormat, path.string() + ": mask tensor must be (height, width)");
    }
    mask = AnnotationMask(static_cast<int>(t.shape[1]), static_cast<int>(t.shape[0]),
                          std::move(t.data));
  }
  if (mask.width() != expected_width || mask.height() != expected_height) {
    throw Error(ErrorKind::kDimensionMismatch,
                path.string() + ": mask is " + std::to_string(mask.width()) + "x" +
                    std::to_string(mask.height()) + ", expected " + std::to_string(expected_width) +
                    "x" + std::to_string(expected_height));
  }
  return mask;
}

void write_mask_png(const AnnotationMask& mask, const fs::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.width());
  image.height = static_cast<png_uint_32>(mask.height());
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(mask.bits().size());
  std::transform(mask.bits().begin(), mask.bits().end(), pixels.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ? 255 : 0); });
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    throw Error(ErrorKind::kIo, path.string() + ": " + msg);
  }
}

void write_mask_tensor(const AnnotationMask& mask, const fs::path& path) {
  write_tensor(path, ByteTensor{{static_cast<std::uint32_t>(mask.height()),
                                 static_cast<std::uint32_t>(mask.width())},
                                mask.bits()});
}

}  // namespace anomem
