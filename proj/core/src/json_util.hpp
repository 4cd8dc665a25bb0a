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

#include <string>
#include <string_view>

#include "anomem/error.hpp"
#include "json.hpp"

namespace anomem::detail {

using Json = nlohmann::json;

inline Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kFormat, what + ": invalid JSON: " + e.what());
  }
}

template <class T>
T required(const Json& obj, const char* key, const std::string& what) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw Error(ErrorKind::kFormat, what + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, what + ": bad field '" + key + "': " + e.what());
  }
}

template <class T>
T optional_or(const Json& obj, const char* key, T fallback, const std::string& what) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, what + ": bad field '" + key + "': " + e.what());
  }
}

// Two-space indented, keys sorted (nlohmann's default map ordering), trailing
// newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace anomem::detail
