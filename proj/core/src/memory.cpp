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

#include "anomem/memory.hpp"

#include <algorithm>
#include <string>

#include "anomem/error.hpp"
#include "anomem/parallel.hpp"
#include "anomem/tensor_io.hpp"
#include "json_util.hpp"

namespace anomem {
namespace fs = std::filesystem;
using detail::Json;

namespace {

// Summed-area table of the mask, (h+1) x (w+1).
class CoverageIndex {
 public:
  explicit CoverageIndex(const AnnotationMask& mask)
      : w_(mask.width()), sums_(static_cast<std::size_t>(mask.width() + 1) * (mask.height() + 1)) {
    for (int y = 0; y < mask.height(); ++y) {
      std::size_t row = 0;
      for (int x = 0; x < mask.width(); ++x) {
        row += mask.at(x, y) ? 1 : 0;
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }

  std::size_t count(int x0, int y0, int w, int h) const {
    return at(x0 + w, y0 + h) + at(x0, y0) - at(x0 + w, y0) - at(x0, y0 + h);
  }

 private:
  std::size_t& at(int x, int y) { return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  std::size_t at(int x, int y) const { return sums_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }

  int w_;
  std::vector<std::size_t> sums_;
};

void check_window_geometry(const WindowLayout& l, int image_width, int image_height) {
  const long long last_y = static_cast<long long>(l.offset_y) +
                           static_cast<long long>(l.rows - 1) * l.stride_y + l.scale_px;
  const long long last_x = static_cast<long long>(l.offset_x) +
                           static_cast<long long>(l.cols - 1) * l.stride_x + l.scale_px;
  if (l.offset_x < 0 || l.offset_y < 0 || last_y > image_height || last_x > image_width) {
    throw Error(ErrorKind::kGeometry,
                "windows of scale " + std::to_string(l.scale_px) + " extend to " +
                    std::to_string(last_x) + "x" + std::to_string(last_y) + " beyond the " +
                    std::to_string(image_width) + "x" + std::to_string(image_height) + " image");
  }
}

std::vector<PatchLabel> labels_with_index(const CoverageIndex& index, const WindowLayout& l,
                                          double theta) {
  std::vector<PatchLabel> labels(l.size());
  const double area = static_cast<double>(l.scale_px) * l.scale_px;
  for (int r = 0; r < l.rows; ++r) {
    for (int c = 0; c < l.cols; ++c) {
      const std::size_t n =
          index.count(l.offset_x + c * l.stride_x, l.offset_y + r * l.stride_y, l.scale_px, l.scale_px);
      PatchLabel label = PatchLabel::kNormal;
      if (n > 0) {
        label = static_cast<double>(n) / area >= theta ? PatchLabel::kAnomalous : PatchLabel::kExcluded;
      }
      labels[static_cast<std::size_t>(r) * l.cols + c] = label;
    }
  }
  return labels;
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "coverage threshold must lie in [0, 1]");
  }
}

void check_samples(std::span<const TrainingSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::kInvalidArgument, "no training samples");
  const auto scales = samples.front().bundle.scales();
  const auto dim = samples.front().bundle.dim();
  for (const auto& s : samples) {
    if (s.bundle.scales() != scales) {
      throw Error(ErrorKind::kScaleMismatch, "bundle '" + s.bundle.image_id + "' has a different scale list");
    }
    if (s.bundle.dim() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "bundle '" + s.bundle.image_id + "' has a different dim");
    }
    if (s.mask && (s.mask->width() != s.bundle.image_width || s.mask->height() != s.bundle.image_height)) {
      throw Error(ErrorKind::kDimensionMismatch, "mask of '" + s.bundle.image_id + "' does not match the image size");
    }
  }
}

// Adds every patch whose label equals `keep` to `bank`.
void collect(std::span<const TrainingSample> samples, double theta, PatchLabel keep, MemoryBank& bank) {
  for (const auto& s : samples) {
    const EmbeddingBundle& b = s.bundle;
    std::optional<CoverageIndex> index;
    if (s.mask) index.emplace(*s.mask);
    for (const ScaleGrid& g : b.grids) {
      check_window_geometry(g.layout, b.image_width, b.image_height);
      std::vector<PatchLabel> labels = index ? labels_with_index(*index, g.layout, theta)
                                             : std::vector<PatchLabel>(g.size(), PatchLabel::kNormal);
      for (std::size_t p = 0; p < g.size(); ++p) {
        if (labels[p] != keep) continue;
        const int row = static_cast<int>(p / g.layout.cols);
        const int col = static_cast<int>(p % g.layout.cols);
        bank.add(g.scale_px(), g.patch(p), Provenance{b.image_id, row, col});
      }
    }
  }
}

std::string role_name(BankRole role) { return role == BankRole::kReference ? "reference" : "anomalous"; }

}  // namespace

std::vector<PatchLabel> assign_patch_labels(const AnnotationMask& mask, const WindowLayout& layout,
                                            int image_width, int image_height, double theta) {
  check_theta(theta);
  if (mask.width() != image_width || mask.height() != image_height) {
    throw Error(ErrorKind::kDimensionMismatch, "mask size does not match the image size");
  }
  check_window_geometry(layout, image_width, image_height);
  return labels_with_index(CoverageIndex(mask), layout, theta);
}

void BankScale::append(std::span<const float> embedding, Provenance provenance) {
  if (embedding.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch, "bank entry dim " + std::to_string(embedding.size()) +
                                                   " != bank dim " + std::to_string(dim_));
  }
  const std::size_t start = data_.size();
  data_.insert(data_.end(), embedding.begin(), embedding.end());
  try {
    ensure_unit(std::span<float>(data_).subspan(start, dim_));
  } catch (...) {
    data_.resize(start);
    throw;
  }
  provenance_.push_back(std::move(provenance));
}

MemoryBank::MemoryBank(BankRole role, std::span<const int> scales, std::size_t dim)
    : role_(role), dim_(dim) {
  if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "bank dim must be positive");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i > 0 && scales[i] <= scales[i - 1]) {
      throw Error(ErrorKind::kInvalidArgument, "bank scales must be strictly increasing");
    }
    scales_.emplace_back(scales[i], dim);
  }
}

std::vector<int> MemoryBank::scales() const {
  std::vector<int> out;
  for (const auto& s : scales_) out.push_back(s.scale_px());
  return out;
}

const BankScale& MemoryBank::at_scale(int scale_px) const {
  for (const auto& s : scales_) {
    if (s.scale_px() == scale_px) return s;
  }
  throw Error(ErrorKind::kScaleMismatch, role_name(role_) + " bank has no scale " + std::to_string(scale_px));
}

BankScale& MemoryBank::at_scale(int scale_px) {
  return const_cast<BankScale&>(std::as_const(*this).at_scale(scale_px));
}

std::size_t MemoryBank::total_entries() const noexcept {
  std::size_t n = 0;
  for (const auto& s : scales_) n += s.size();
  return n;
}

MemoryBank build_reference_bank(std::span<const TrainingSample> samples, double theta) {
  check_theta(theta);
  check_samples(samples);
  const auto scales = samples.front().bundle.scales();
  MemoryBank bank(BankRole::kReference, scales, samples.front().bundle.dim());
  collect(samples, theta, PatchLabel::kNormal, bank);
  for (const auto& s : bank.per_scale()) {
    if (s.empty()) {
      throw Error(ErrorKind::kEmptyBank, "no normal patch at scale " + std::to_string(s.scale_px()));
    }
  }
  return bank;
}

MemoryBank build_anomalous_bank(std::span<const TrainingSample> samples, double theta) {
  check_theta(theta);
  check_samples(samples);
  const bool any_pixels = std::any_of(samples.begin(), samples.end(), [](const TrainingSample& s) {
    return s.mask && !s.mask->empty();
  });
  if (!any_pixels) throw Error(ErrorKind::kNoAnomalousPixels, "no training mask marks any pixel");
  const auto scales = samples.front().bundle.scales();
  MemoryBank bank(BankRole::kAnomalous, scales, samples.front().bundle.dim());
  collect(samples, theta, PatchLabel::kAnomalous, bank);
  return bank;
}

Top1 top1_similarity(std::span<const float> query, const BankScale& bank) {
  if (bank.empty()) {
    throw Error(ErrorKind::kEmptyScale, "bank is empty at scale " + std::to_string(bank.scale_px()));
  }
  if (query.size() != bank.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "query dim " + std::to_string(query.size()) +
                                                   " != bank dim " + std::to_string(bank.dim()));
  }
  Top1 best{clamp_similarity(dot(query, bank.entry(0))), 0};
  for (std::size_t i = 1; i < bank.size(); ++i) {
    const double s = clamp_similarity(dot(query, bank.entry(i)));
    if (s > best.similarity) best = Top1{s, i};
  }
  return best;
}

Top1 top1_similarity(std::span<const float> query, const MemoryBank& bank, int scale_px) {
  return top1_similarity(query, bank.at_scale(scale_px));
}

std::vector<Top1> top1_batch(std::span<const float> queries, const BankScale& bank, std::size_t threads) {
  const std::size_t dim = bank.dim();
  if (queries.size() % dim != 0) {
    throw Error(ErrorKind::kDimensionMismatch, "query block is not a multiple of the bank dim");
  }
  const std::size_t n = queries.size() / dim;
  if (n == 0) return {};
  if (bank.empty()) {
    throw Error(ErrorKind::kEmptyScale, "bank is empty at scale " + std::to_string(bank.scale_px()));
  }

  // Tiles of kQueryBlock queries against kEntryBlock entries keep both
  // operands cache resident. Each query still visits entries in ascending
  // order with the same dot kernel, so results match the sequential scan.
  constexpr std::size_t kQueryBlock = 8;
  constexpr std::size_t kEntryBlock = 128;
  std::vector<Top1> out(n);
  const std::size_t n_blocks = (n + kQueryBlock - 1) / kQueryBlock;
  parallel_for(n_blocks, threads, [&](std::size_t block) {
    const std::size_t q0 = block * kQueryBlock;
    const std::size_t q1 = std::min(n, q0 + kQueryBlock);
    for (std::size_t q = q0; q < q1; ++q) out[q] = Top1{-2.0, 0};
    for (std::size_t e0 = 0; e0 < bank.size(); e0 += kEntryBlock) {
      const std::size_t e1 = std::min(bank.size(), e0 + kEntryBlock);
      for (std::size_t q = q0; q < q1; ++q) {
        const auto query = queries.subspan(q * dim, dim);
        Top1 best = out[q];
        for (std::size_t e = e0; e < e1; ++e) {
          const double s = clamp_similarity(dot(query, bank.entry(e)));
          if (s > best.similarity) best = Top1{s, e};
        }
        out[q] = best;
      }
    }
  });
  return out;
}

void save_bank(const MemoryBank& bank, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  Json m;
  m["format"] = "AEB-bank";
  m["version"] = 1;
  m["role"] = role_name(bank.role());
  m["embedding_dim"] = bank.dim();
  Json scales = Json::array();
  for (const BankScale& s : bank.per_scale()) {
    const std::string name = "scale_" + std::to_string(s.scale_px()) + ".aeb";
    write_tensor(dir / name, FloatTensor{{static_cast<std::uint32_t>(s.size()),
                                          static_cast<std::uint32_t>(s.dim())},
                                         {s.data().begin(), s.data().end()}});
    Json prov = Json::array();
    for (const auto& p : s.provenance()) prov.push_back({p.image_id, p.row, p.col});
    scales.push_back({{"scale_px", s.scale_px()}, {"entries", s.size()}, {"tensor", name},
                      {"provenance", std::move(prov)}});
  }
  m["scales"] = std::move(scales);
  write_text_file(dir / "bank.json", detail::dump(m));
}

namespace {

MemoryBank load_bank_unchecked(const fs::path& dir) {
  const fs::path path = dir / "bank.json";
  const std::string what = path.string();
  const Json m = detail::parse_json(read_text_file(path), what);
  if (detail::optional_or<std::string>(m, "format", "", what) != "AEB-bank" ||
      detail::required<int>(m, "version", what) != 1) {
    throw Error(ErrorKind::kFormat, what + ": not a version 1 bank manifest");
  }
  const auto role_text = detail::required<std::string>(m, "role", what);
  if (role_text != "reference" && role_text != "anomalous") {
    throw Error(ErrorKind::kFormat, what + ": unknown bank role '" + role_text + "'");
  }
  const BankRole role = role_text == "reference" ? BankRole::kReference : BankRole::kAnomalous;
  const auto dim = detail::required<std::size_t>(m, "embedding_dim", what);
  const auto& scales_json = m.at("scales");
  std::vector<int> scales;
  for (const auto& s : scales_json) scales.push_back(detail::required<int>(s, "scale_px", what));
  MemoryBank bank(role, scales, dim);
  for (const auto& s : scales_json) {
    const int scale = s.at("scale_px").get<int>();
    const auto name = detail::required<std::string>(s, "tensor", what);
    const FloatTensor t = read_float_tensor(dir / name);
    const auto entries = detail::required<std::size_t>(s, "entries", what);
    if (t.shape.size() != 2 || t.shape[0] != entries || t.shape[1] != dim) {
      throw Error(ErrorKind::kIntegrity, what + ": tensor of scale " + std::to_string(scale) +
                                             " disagrees with the declared entry count");
    }
    const auto& prov = s.at("provenance");
    if (prov.size() != entries) {
      throw Error(ErrorKind::kIntegrity, what + ": provenance count disagrees with entries");
    }
    for (std::size_t i = 0; i < entries; ++i) {
      bank.add(scale, std::span<const float>(t.data).subspan(i * dim, dim),
               Provenance{prov[i].at(0).get<std::string>(), prov[i].at(1).get<int>(),
                          prov[i].at(2).get<int>()});
    }
  }
  return bank;
}

}  // namespace

MemoryBank load_bank(const fs::path& dir) {
  try {
    return load_bank_unchecked(dir);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, (dir / "bank.json").string() + ": " + e.what());
  }
}

}  // namespace anomem
