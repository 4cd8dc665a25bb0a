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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anomem {

// AEB1 tensor container, little-endian throughout:
//
//   offset  size  field
//   0       4     magic "AEB1"
//   4       1     version (1)
//   5       1     element code (1 = float32, 2 = uint8)
//   6       2     reserved, zero
//   8       4     rank
//   12      4*r   dims
//   ...           row-major payload
//
// The file size must equal the header plus the declared payload exactly.
enum class ElementType : std::uint8_t { kFloat32 = 1, kUint8 = 2 };

inline constexpr std::uint8_t kTensorVersion = 1;

template <class T>
struct Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<T> data;

  std::size_t element_count() const noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
  }
};

using FloatTensor = Tensor<float>;
using ByteTensor = Tensor<std::uint8_t>;

std::vector<std::uint8_t> encode_tensor(const FloatTensor& t);
std::vector<std::uint8_t> encode_tensor(const ByteTensor& t);

// Throw kFormat for bad magic/version/element code and kIntegrity when the
// payload length disagrees with the declared shape.
FloatTensor decode_float_tensor(std::span<const std::uint8_t> bytes);
ByteTensor decode_byte_tensor(std::span<const std::uint8_t> bytes);

FloatTensor read_float_tensor(const std::filesystem::path& path);
ByteTensor read_byte_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const FloatTensor& t);
void write_tensor(const std::filesystem::path& path, const ByteTensor& t);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace anomem
