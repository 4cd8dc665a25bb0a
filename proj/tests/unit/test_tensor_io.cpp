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

#include <gtest/gtest.h>

#include <cstring>

#include "anomem/error.hpp"
#include "anomem/tensor_io.hpp"
#include "synthetic.hpp"

namespace anomem {
namespace {

ErrorKind decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_float_tensor(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorKind::kInvalidArgument;
}

FloatTensor sample_tensor() {
  return FloatTensor{{2, 3}, {1.0f, -2.0f, 0.5f, 0.0f, 3.25f, -0.125f}};
}

TEST(TensorIo, ExactByteLayout) {
  const auto bytes = encode_tensor(FloatTensor{{2}, {1.0f, -2.0f}});
  const std::vector<std::uint8_t> expected{
      'A', 'E', 'B', '1', 1, 1, 0, 0,   // magic, version, element code, reserved
      1, 0, 0, 0,                       // rank
      2, 0, 0, 0,                       // dims
      0x00, 0x00, 0x80, 0x3f,           // 1.0f
      0x00, 0x00, 0x00, 0xc0};          // -2.0f
  EXPECT_EQ(bytes, expected);
}

TEST(TensorIo, FloatRoundTrip) {
  const FloatTensor t = sample_tensor();
  const FloatTensor back = decode_float_tensor(encode_tensor(t));
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_EQ(std::memcmp(back.data.data(), t.data.data(), t.data.size() * sizeof(float)), 0);
}

TEST(TensorIo, ByteRoundTripAndTypeCheck) {
  const ByteTensor t{{2, 2}, {0, 1, 1, 0}};
  const auto bytes = encode_tensor(t);
  EXPECT_EQ(bytes[5], 2);
  const ByteTensor back = decode_byte_tensor(bytes);
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_EQ(back.data, t.data);
  EXPECT_EQ(decode_error(bytes), ErrorKind::kFormat);
}

TEST(TensorIo, EmptyLeadingDimension) {
  const FloatTensor t{{0, 4}, {}};
  const FloatTensor back = decode_float_tensor(encode_tensor(t));
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_TRUE(back.data.empty());
}

TEST(TensorIo, RejectsBadHeader) {
  const auto good = encode_tensor(sample_tensor());
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), ErrorKind::kFormat);
  auto bad_version = good;
  bad_version[4] = 99;
  EXPECT_EQ(decode_error(bad_version), ErrorKind::kFormat);
  auto bad_code = good;
  bad_code[5] = 7;
  EXPECT_EQ(decode_error(bad_code), ErrorKind::kFormat);
  auto bad_reserved = good;
  bad_reserved[7] = 1;
  EXPECT_EQ(decode_error(bad_reserved), ErrorKind::kFormat);
  EXPECT_EQ(decode_error({'A', 'E'}), ErrorKind::kFormat);
}

TEST(TensorIo, RejectsWrongPayloadLength) {
  const auto good = encode_tensor(sample_tensor());
  auto truncated = good;
  truncated.pop_back();
  EXPECT_EQ(decode_error(truncated), ErrorKind::kIntegrity);
  auto extended = good;
  extended.insert(extended.end(), {0, 0, 0, 0});
  EXPECT_EQ(decode_error(extended), ErrorKind::kIntegrity);
  auto short_dims = good;
  short_dims.resize(14);
  EXPECT_NE(decode_error(short_dims), ErrorKind::kInvalidArgument);
}

TEST(TensorIo, FileRoundTripAndMissingFile) {
  testing::TempDir dir;
  const FloatTensor t = sample_tensor();
  write_tensor(dir / "t.aeb", t);
  EXPECT_EQ(read_float_tensor(dir / "t.aeb").data, t.data);
  try {
    read_float_tensor(dir / "missing.aeb");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

}  // namespace
}  // namespace anomem
