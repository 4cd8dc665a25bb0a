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
#include <fstream>

#include "anomem/bundle.hpp"
#include "anomem/error.hpp"
#include "anomem/tensor_io.hpp"
#include "json.hpp"
#include "synthetic.hpp"

namespace anomem {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

ErrorKind read_error(const fs::path& dir) {
  try {
    read_bundle(dir);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "read_bundle succeeded";
  return ErrorKind::kInvalidArgument;
}

void edit_manifest(const fs::path& dir, auto&& edit) {
  auto j = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  edit(j);
  write_text_file(dir / "manifest.json", j.dump());
}

bool bit_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

TEST(Bundle, TwoScaleRoundTrip) {
  TempDir dir;
  RngStream rng(1, "bundle-test");
  EmbeddingBundle b = testing::random_bundle(rng, "img", 8, {16, 32}, 64);
  b.class_name = "widget";
  b.label = Label::kAnomalous;
  write_bundle(b, dir / "b");
  const EmbeddingBundle back = read_bundle(dir / "b");
  ASSERT_EQ(back.grids.size(), 2u);
  EXPECT_EQ(back, b);
}

TEST(Bundle, RandomRoundTripsAreBitExact) {
  TempDir dir;
  RngStream rng(2, "bundle-test");
  for (int i = 0; i < 20; ++i) {
    const std::size_t dim = 1 + rng.uniform_index(24);
    EmbeddingBundle b = testing::random_bundle(rng, "r" + std::to_string(i), dim, {16, 32, 48, 112});
    if (i % 3 == 0) b.label = Label::kNormal;
    const fs::path p = dir / ("b" + std::to_string(i));
    write_bundle(b, p);
    const EmbeddingBundle back = read_bundle(p);
    EXPECT_TRUE(bit_equal(testing::to_vector(back.global_embedding.values()),
                          testing::to_vector(b.global_embedding.values())));
    for (std::size_t g = 0; g < b.grids.size(); ++g) EXPECT_TRUE(bit_equal(back.grids[g].data, b.grids[g].data));
    EXPECT_EQ(back, b);
    // Second write of the loaded bundle reproduces identical files.
    write_bundle(back, p / "again");
    for (const char* f : {"global.aeb", "grid_16.aeb", "grid_112.aeb", "manifest.json"}) {
      EXPECT_EQ(read_file_bytes(p / f), read_file_bytes(p / "again" / f)) << f;
    }
  }
}

TEST(Bundle, DeclaredGridLargerThanPayload) {
  TempDir dir;
  RngStream rng(3, "bundle-test");
  const EmbeddingBundle b = testing::random_bundle(rng, "img", 4, {16}, 64);  // 4x4 grid
  write_bundle(b, dir / "b");
  FloatTensor t = read_float_tensor(dir / "b" / "grid_16.aeb");
  t.shape = {15, 4};
  t.data.resize(15 * 4);
  write_tensor(dir / "b" / "grid_16.aeb", t);
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kIntegrity);
}

TEST(Bundle, TruncatedTensorFile) {
  TempDir dir;
  RngStream rng(4, "bundle-test");
  write_bundle(testing::random_bundle(rng, "img", 4, {16}, 64), dir / "b");
  auto bytes = read_file_bytes(dir / "b" / "grid_16.aeb");
  bytes.resize(bytes.size() - 4);
  write_file_bytes(dir / "b" / "grid_16.aeb", bytes);
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kIntegrity);
}

TEST(Bundle, TensorVersion99) {
  TempDir dir;
  RngStream rng(5, "bundle-test");
  write_bundle(testing::random_bundle(rng, "img", 4, {16}, 64), dir / "b");
  auto bytes = read_file_bytes(dir / "b" / "global.aeb");
  bytes[4] = 99;
  write_file_bytes(dir / "b" / "global.aeb", bytes);
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kFormat);
}

TEST(Bundle, ManifestProblems) {
  TempDir dir;
  RngStream rng(6, "bundle-test");
  const EmbeddingBundle b = testing::random_bundle(rng, "img", 4, {16, 32}, 64);
  write_bundle(b, dir / "b");
  edit_manifest(dir / "b", [](auto& j) { j["version"] = 2; });
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kFormat);

  write_bundle(b, dir / "b");
  edit_manifest(dir / "b", [](auto& j) { j["label"] = "yes"; });
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kFormat);

  write_bundle(b, dir / "b");
  edit_manifest(dir / "b", [](auto& j) { j["grids"][0]["tensor"] = "../elsewhere.aeb"; });
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kFormat);

  write_bundle(b, dir / "b");
  edit_manifest(dir / "b", [](auto& j) { j["embedding_dim"] = 5; });
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kIntegrity);

  write_text_file(dir / "b" / "manifest.json", "{not json");
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kFormat);

  EXPECT_EQ(read_error(dir / "nowhere"), ErrorKind::kIo);
}

TEST(Bundle, StoredEmbeddingsAreRenormalized) {
  TempDir dir;
  RngStream rng(7, "bundle-test");
  write_bundle(testing::random_bundle(rng, "img", 4, {16}, 32), dir / "b");
  FloatTensor t = read_float_tensor(dir / "b" / "grid_16.aeb");
  for (auto& x : t.data) x *= 3.0f;
  write_tensor(dir / "b" / "grid_16.aeb", t);
  const EmbeddingBundle back = read_bundle(dir / "b");
  for (std::size_t p = 0; p < back.grids[0].size(); ++p) {
    EXPECT_NEAR(norm(back.grids[0].patch(p)), 1.0, 1e-5);
  }
}

TEST(Bundle, ZeroStoredEmbeddingRejected) {
  TempDir dir;
  RngStream rng(8, "bundle-test");
  write_bundle(testing::random_bundle(rng, "img", 4, {16}, 32), dir / "b");
  FloatTensor t = read_float_tensor(dir / "b" / "grid_16.aeb");
  std::fill(t.data.begin(), t.data.begin() + 4, 0.0f);
  write_tensor(dir / "b" / "grid_16.aeb", t);
  EXPECT_EQ(read_error(dir / "b"), ErrorKind::kNormalization);
}

TEST(Bundle, AcceptsFlatGridTensorAndDefaultLayout) {
  TempDir dir;
  RngStream rng(9, "bundle-test");
  const EmbeddingBundle b = testing::random_bundle(rng, "img", 4, {16}, 32);
  write_bundle(b, dir / "b");
  FloatTensor t = read_float_tensor(dir / "b" / "grid_16.aeb");
  t.shape = {4, 4};
  write_tensor(dir / "b" / "grid_16.aeb", t);
  edit_manifest(dir / "b", [](auto& j) {
    j["grids"][0].erase("stride");
    j["grids"][0].erase("offset");
  });
  EXPECT_EQ(read_bundle(dir / "b"), b);
}

TEST(Bundle, MismatchedDimsRejectedBeforeWrite) {
  TempDir dir;
  RngStream rng(10, "bundle-test");
  EmbeddingBundle b = testing::random_bundle(rng, "img", 4, {16, 32}, 64);
  b.grids[1] = testing::random_bundle(rng, "other", 6, {32}, 64).grids[0];
  try {
    write_bundle(b, dir / "b");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDimensionMismatch);
  }
  EXPECT_FALSE(fs::exists(dir / "b"));
}

TEST(Bundle, UnwritableLocation) {
  TempDir dir;
  std::ofstream(dir / "plain_file") << "x";
  RngStream rng(11, "bundle-test");
  try {
    write_bundle(testing::random_bundle(rng, "img", 4, {16}, 32), dir / "plain_file" / "b");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(TextStates, RoundTripAndShapeCheck) {
  TempDir dir;
  RngStream rng(12, "bundle-test");
  const TextStatePair s{FeatureVector(testing::random_unit(rng, 6)), FeatureVector(testing::random_unit(rng, 6))};
  write_text_states(s, dir / "t.aeb");
  const TextStatePair back = read_text_states(dir / "t.aeb");
  EXPECT_EQ(back.normal, s.normal);
  EXPECT_EQ(back.anomalous, s.anomalous);
  write_tensor(dir / "bad.aeb", FloatTensor{{3, 2}, {1, 0, 0, 1, 1, 1}});
  try {
    read_text_states(dir / "bad.aeb");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIntegrity);
  }
}

}  // namespace
}  // namespace anomem
