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

#include "anomem/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "anomem/error.hpp"
#include "anomem/parallel.hpp"

namespace anomem {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::string_view label)
    : RngStream(seed, std::string(label), splitmix64(seed ^ splitmix64(fnv1a64(label)))) {}

RngStream::RngStream(std::uint64_t seed, std::string label, std::uint64_t engine_seed)
    : seed_(seed), label_(std::move(label)), engine_seed_(engine_seed), engine_(engine_seed) {}

RngStream RngStream::substream(std::uint64_t index) const {
  const std::uint64_t child = splitmix64(engine_seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return RngStream(seed_, label_ + "/" + std::to_string(index), child);
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "uniform_index(0)");
  // Reject the tail that would bias the modulo.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_normal_ = true;
  return u * f;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw Error(ErrorKind::kInvalidArgument, "gamma shape must be positive");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = gamma(shape + 1.0);
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::student_t(double dof) {
  if (!(dof > 0.0)) throw Error(ErrorKind::kInvalidArgument, "student-t dof must be positive");
  const double z = normal();
  const double chi2 = 2.0 * gamma(0.5 * dof);
  return z / std::sqrt(chi2 / dof);
}

std::size_t resolve_threads(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    n = hw == 0 ? 1 : hw;
  }
  if (const char* env = std::getenv("ANOMEM_THREADS")) {
    char* end = nullptr;
    const unsigned long long cap = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return n;
}

}  // namespace anomem
