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

namespace anomem {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// RFC 4180 field quoting: wraps in quotes when the field contains a comma,
// quote or newline, doubling embedded quotes.
std::string csv_field(std::string_view field);

}  // namespace anomem
