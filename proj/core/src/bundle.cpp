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

#include "anomem/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anomem/error.hpp"
#include "anomem/tensor_io.hpp"
#include "json_util.hpp"

namespace anomem {
namespace fs = std::filesystem;
using detail::Json;

namespace {

constexpr int kManifestVersion = 1;

std::string grid_file_name(int scale_px) { return "grid_" + std::to_string(scale_px) + ".aeb"; }

// Relative names only: a manifest must not reach outside its directory.
fs::path resolve_inside(const fs::path& dir, const std::string& name, const std::string& what) {
  const fs::path rel(name);
  if (name.empty() || rel.is_absolute() ||
      std::any_of(rel.begin(), rel.end(), [](const fs::path& p) { return p == ".."; })) {
    throw Error(ErrorKind::kFormat, what + ": tensor file name '" + name + "' must be relative");
  }
  return dir / rel;
}

}  // namespace

WindowLayout WindowLayout::tiled(int scale_px, int rows, int cols) {
  return WindowLayout{scale_px, rows, cols, scale_px, scale_px, 0, 0};
}

std::vector<int> EmbeddingBundle::scales() const {
  std::vector<int> out;
  out.reserve(grids.size());
  for (const auto& g : grids) out.push_back(g.scale_px());
  return out;
}

const ScaleGrid& EmbeddingBundle::grid(int scale_px) const {
  for (const auto& g : grids) {
    if (g.scale_px() == scale_px) return g;
  }
  throw Error(ErrorKind::kScaleMismatch,
              "bundle '" + image_id + "' has no grid at scale " + std::to_string(scale_px));
}

void ensure_unit(std::span<float> v) {
  const double n = norm(v);
  if (!(n >= 1e-12) || !std::isfinite(n)) {
    throw Error(ErrorKind::kNormalization, "zero or non-finite embedding");
  }
  if (std::abs(n - 1.0) > 1e-6) {
    for (float& x : v) x = static_cast<float>(static_cast<double>(x) / n);
  }
}

void EmbeddingBundle::validate() const {
  const std::string what = "bundle '" + image_id + "'";
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorKind::kInvalidArgument, what + ": image size must be positive");
  }
  if (global_embedding.empty()) {
    throw Error(ErrorKind::kInvalidArgument, what + ": missing global embedding");
  }
  if (!global_embedding.is_unit()) {
    throw Error(ErrorKind::kNormalization, what + ": global embedding is not unit-normalized");
  }
  if (grids.empty()) throw Error(ErrorKind::kInvalidArgument, what + ": no scale grids");
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const ScaleGrid& g = grids[i];
    const WindowLayout& l = g.layout;
    if (l.scale_px <= 0 || l.rows <= 0 || l.cols <= 0 || l.stride_y <= 0 || l.stride_x <= 0) {
      throw Error(ErrorKind::kInvalidArgument, what + ": invalid grid geometry");
    }
    if (i > 0 && grids[i - 1].scale_px() >= l.scale_px) {
      throw Error(ErrorKind::kInvalidArgument, what + ": scales must be strictly increasing");
    }
    if (g.dim != dim()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  what + ": grid dim " + std::to_string(g.dim) + " != global dim " +
                      std::to_string(dim()));
    }
    if (g.data.size() != g.size() * g.dim) {
      throw Error(ErrorKind::kIntegrity, what + ": grid data size does not match its shape");
    }
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto v = g.patch(p);
      for (float x : v) {
        if (!std::isfinite(x)) {
          throw Error(ErrorKind::kInvalidArgument, what + ": non-finite patch embedding");
        }
      }
      if (std::abs(norm(v) - 1.0) > 1e-5) {
        throw Error(ErrorKind::kNormalization, what + ": patch embedding is not unit-normalized");
      }
    }
  }
}

namespace {

EmbeddingBundle read_bundle_unchecked(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  const std::string what = manifest_path.string();
  const Json m = detail::parse_json(read_text_file(manifest_path), what);
  if (!m.is_object()) throw Error(ErrorKind::kFormat, what + ": manifest must be an object");
  if (detail::optional_or<std::string>(m, "format", "AEB", what) != "AEB") {
    throw Error(ErrorKind::kFormat, what + ": not an AEB manifest");
  }
  const int version = detail::required<int>(m, "version", what);
  if (version != kManifestVersion) {
    throw Error(ErrorKind::kFormat, what + ": unsupported manifest version " + std::to_string(version));
  }

  EmbeddingBundle b;
  b.image_id = detail::required<std::string>(m, "image_id", what);
  b.class_name = detail::optional_or<std::string>(m, "class_name", "", what);
  b.image_width = detail::required<int>(m, "image_width", what);
  b.image_height = detail::required<int>(m, "image_height", what);
  const auto dim = detail::required<std::size_t>(m, "embedding_dim", what);
  if (dim == 0) throw Error(ErrorKind::kFormat, what + ": embedding_dim must be positive");
  if (auto it = m.find("label"); it != m.end() && !it->is_null()) {
    const int label = it->get<int>();
    if (label != 0 && label != 1) throw Error(ErrorKind::kFormat, what + ": label must be 0 or 1");
    b.label = static_cast<Label>(label);
  }

  {
    const auto name = detail::required<std::string>(m, "global_embedding", what);
    FloatTensor t = read_float_tensor(resolve_inside(dir, name, what));
    const bool shape_ok = (t.shape.size() == 1 && t.shape[0] == dim) ||
                          (t.shape.size() == 2 && t.shape[0] == 1 && t.shape[1] == dim);
    if (!shape_ok) {
      throw Error(ErrorKind::kIntegrity, what + ": global embedding tensor shape disagrees with embedding_dim");
    }
    ensure_unit(t.data);
    b.global_embedding = FeatureVector(std::move(t.data));
  }

  const auto grids = m.find("grids");
  if (grids == m.end() || !grids->is_array() || grids->empty()) {
    throw Error(ErrorKind::kFormat, what + ": 'grids' must be a nonempty array");
  }
  if (auto s = m.find("scales"); s != m.end()) {
    const auto declared = s->get<std::vector<int>>();
    if (declared.size() != grids->size()) {
      throw Error(ErrorKind::kIntegrity, what + ": 'scales' and 'grids' disagree");
    }
  }
  for (const Json& gj : *grids) {
    ScaleGrid g;
    g.dim = dim;
    WindowLayout& l = g.layout;
    l.scale_px = detail::required<int>(gj, "scale_px", what);
    l.rows = detail::required<int>(gj, "rows", what);
    l.cols = detail::required<int>(gj, "cols", what);
    const auto stride = detail::optional_or<std::vector<int>>(gj, "stride", {l.scale_px, l.scale_px}, what);
    const auto offset = detail::optional_or<std::vector<int>>(gj, "offset", {0, 0}, what);
    if (stride.size() != 2 || offset.size() != 2) {
      throw Error(ErrorKind::kFormat, what + ": stride and offset are [y, x] pairs");
    }
    l.stride_y = stride[0];
    l.stride_x = stride[1];
    l.offset_y = offset[0];
    l.offset_x = offset[1];
    if (l.rows <= 0 || l.cols <= 0) throw Error(ErrorKind::kFormat, what + ": grid shape must be positive");

    const auto name = detail::required<std::string>(gj, "tensor", what);
    FloatTensor t = read_float_tensor(resolve_inside(dir, name, what));
    const auto rows = static_cast<std::uint32_t>(l.rows);
    const auto cols = static_cast<std::uint32_t>(l.cols);
    const bool shape_ok =
        (t.shape.size() == 3 && t.shape[0] == rows && t.shape[1] == cols && t.shape[2] == dim) ||
        (t.shape.size() == 2 && t.shape[0] == rows * cols && t.shape[1] == dim);
    if (!shape_ok) {
      throw Error(ErrorKind::kIntegrity,
                  what + ": grid at scale " + std::to_string(l.scale_px) + " declares " +
                      std::to_string(l.rows) + "x" + std::to_string(l.cols) +
                      " patches but its tensor holds " + std::to_string(t.data.size() / dim) + " vectors");
    }
    g.data = std::move(t.data);
    for (std::size_t p = 0; p < g.size(); ++p) {
      ensure_unit(std::span<float>(g.data).subspan(p * dim, dim));
    }
    b.grids.push_back(std::move(g));
  }
  b.validate();
  return b;
}

}  // namespace

EmbeddingBundle read_bundle(const fs::path& dir) {
  try {
    return read_bundle_unchecked(dir);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, (dir / "manifest.json").string() + ": " + e.what());
  }
}

void write_bundle(const EmbeddingBundle& bundle, const fs::path& dir) {
  bundle.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());

  Json m;
  m["format"] = "AEB";
  m["version"] = kManifestVersion;
  m["image_id"] = bundle.image_id;
  m["class_name"] = bundle.class_name;
  m["image_width"] = bundle.image_width;
  m["image_height"] = bundle.image_height;
  m["embedding_dim"] = bundle.dim();
  m["label"] = bundle.label ? Json(static_cast<int>(*bundle.label)) : Json(nullptr);
  m["global_embedding"] = "global.aeb";
  m["scales"] = bundle.scales();
  Json grids = Json::array();

  const auto gv = bundle.global_embedding.values();
  write_tensor(dir / "global.aeb",
               FloatTensor{{static_cast<std::uint32_t>(bundle.dim())}, {gv.begin(), gv.end()}});
  for (const ScaleGrid& g : bundle.grids) {
    const WindowLayout& l = g.layout;
    const std::string name = grid_file_name(l.scale_px);
    write_tensor(dir / name,
                 FloatTensor{{static_cast<std::uint32_t>(l.rows), static_cast<std::uint32_t>(l.cols),
                              static_cast<std::uint32_t>(g.dim)},
                             g.data});
    grids.push_back({{"scale_px", l.scale_px},
                     {"rows", l.rows},
                     {"cols", l.cols},
                     {"stride", {l.stride_y, l.stride_x}},
                     {"offset", {l.offset_y, l.offset_x}},
                     {"tensor", name}});
  }
  m["grids"] = std::move(grids);
  write_text_file(dir / "manifest.json", detail::dump(m));
}

TextStatePair read_text_states(const fs::path& path) {
  FloatTensor t = read_float_tensor(path);
  if (t.shape.size() != 2 || t.shape[0] != 2 || t.shape[1] == 0) {
    throw Error(ErrorKind::kIntegrity, path.string() + ": text states must have shape (2, dim)");
  }
  const std::size_t dim = t.shape[1];
  std::vector<float> normal(t.data.begin(), t.data.begin() + dim);
  std::vector<float> anomalous(t.data.begin() + dim, t.data.end());
  ensure_unit(normal);
  ensure_unit(anomalous);
  return TextStatePair{FeatureVector(std::move(normal)), FeatureVector(std::move(anomalous))};
}

void write_text_states(const TextStatePair& states, const fs::path& path) {
  if (states.normal.dim() != states.anomalous.dim() || states.normal.empty()) {
    throw Error(ErrorKind::kDimensionMismatch, "text states must share a positive dim");
  }
  FloatTensor t{{2, static_cast<std::uint32_t>(states.normal.dim())}, {}};
  t.data.assign(states.normal.values().begin(), states.normal.values().end());
  t.data.insert(t.data.end(), states.anomalous.values().begin(), states.anomalous.values().end());
  write_tensor(path, t);
}

}  // namespace anomem
