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

#include "anomem/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "anomem/error.hpp"

namespace anomem {
namespace {

constexpr std::uint8_t kMagic[4] = {'A', 'E', 'B', '1'};
constexpr std::uint32_t kMaxRank = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> encode_header(ElementType type, const std::vector<std::uint32_t>& shape) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kTensorVersion);
  out.push_back(static_cast<std::uint8_t>(type));
  out.push_back(0);
  out.push_back(0);
  put_u32(out, static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) put_u32(out, d);
  return out;
}

struct Header {
  ElementType type;
  std::vector<std::uint32_t> shape;
  std::size_t payload_offset;
  std::size_t element_count;
};

Header decode_header(std::span<const std::uint8_t> bytes, ElementType expected) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(ErrorKind::kFormat, "missing AEB1 magic");
  }
  if (bytes[4] != kTensorVersion) {
    throw Error(ErrorKind::kFormat, "unsupported AEB1 version " + std::to_string(bytes[4]));
  }
  const std::uint8_t code = bytes[5];
  if (code != static_cast<std::uint8_t>(ElementType::kFloat32) &&
      code != static_cast<std::uint8_t>(ElementType::kUint8)) {
    throw Error(ErrorKind::kFormat, "unknown element code " + std::to_string(code));
  }
  if (code != static_cast<std::uint8_t>(expected)) {
    throw Error(ErrorKind::kFormat, "unexpected element code " + std::to_string(code));
  }
  if (bytes[6] != 0 || bytes[7] != 0) {
    throw Error(ErrorKind::kFormat, "reserved header bytes are not zero");
  }
  const std::uint32_t rank = get_u32(bytes, 8);
  if (rank > kMaxRank) {
    throw Error(ErrorKind::kFormat, "rank " + std::to_string(rank) + " too large");
  }
  const std::size_t payload_offset = 12 + 4 * static_cast<std::size_t>(rank);
  if (bytes.size() < payload_offset) {
    throw Error(ErrorKind::kIntegrity, "truncated tensor header");
  }
  Header h{static_cast<ElementType>(code), {}, payload_offset, 1};
  h.shape.reserve(rank);
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::uint32_t d = get_u32(bytes, 12 + 4 * i);
    if (d != 0 && h.element_count > std::numeric_limits<std::size_t>::max() / 8 / d) {
      throw Error(ErrorKind::kIntegrity, "tensor shape overflows");
    }
    h.element_count *= d;
    h.shape.push_back(d);
  }
  const std::size_t elem = code == static_cast<std::uint8_t>(ElementType::kFloat32) ? 4 : 1;
  if (bytes.size() - payload_offset != h.element_count * elem) {
    throw Error(ErrorKind::kIntegrity,
                "payload holds " + std::to_string(bytes.size() - payload_offset) +
                    " bytes but shape declares " + std::to_string(h.element_count * elem));
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const FloatTensor& t) {
  if (t.element_count() != t.data.size()) {
    throw Error(ErrorKind::kIntegrity, "tensor data does not match its shape");
  }
  auto out = encode_header(ElementType::kFloat32, t.shape);
  out.reserve(out.size() + 4 * t.data.size());
  for (float f : t.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  return out;
}

std::vector<std::uint8_t> encode_tensor(const ByteTensor& t) {
  if (t.element_count() != t.data.size()) {
    throw Error(ErrorKind::kIntegrity, "tensor data does not match its shape");
  }
  auto out = encode_header(ElementType::kUint8, t.shape);
  out.insert(out.end(), t.data.begin(), t.data.end());
  return out;
}

FloatTensor decode_float_tensor(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes, ElementType::kFloat32);
  FloatTensor t{h.shape, std::vector<float>(h.element_count)};
  for (std::size_t i = 0; i < h.element_count; ++i) {
    t.data[i] = std::bit_cast<float>(get_u32(bytes, h.payload_offset + 4 * i));
  }
  return t;
}

ByteTensor decode_byte_tensor(std::span<const std::uint8_t> bytes) {
  const Header h = decode_header(bytes, ElementType::kUint8);
  auto payload = bytes.subspan(h.payload_offset);
  return ByteTensor{h.shape, std::vector<std::uint8_t>(payload.begin(), payload.end())};
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string read_text_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

FloatTensor read_float_tensor(const std::filesystem::path& path) {
  try {
    return decode_float_tensor(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path.string() + ": " + std::string(e.what()));
  }
}

ByteTensor read_byte_tensor(const std::filesystem::path& path) {
  try {
    return decode_byte_tensor(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kIo) throw;
    throw Error(e.kind(), path.string() + ": " + std::string(e.what()));
  }
}

void write_tensor(const std::filesystem::path& path, const FloatTensor& t) {
  write_file_bytes(path, encode_tensor(t));
}

void write_tensor(const std::filesystem::path& path, const ByteTensor& t) {
  write_file_bytes(path, encode_tensor(t));
}

}  // namespace anomem
