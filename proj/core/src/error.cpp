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

#include "anomem/error.hpp"

namespace anomem {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kZeroVector: return "ZeroVector";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kFormat: return "FormatError";
    case ErrorKind::kIntegrity: return "IntegrityError";
    case ErrorKind::kNormalization: return "NormalizationError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kGeometry: return "GeometryError";
    case ErrorKind::kScaleMismatch: return "ScaleMismatch";
    case ErrorKind::kEmptyBank: return "EmptyBank";
    case ErrorKind::kNoAnomalousPixels: return "NoAnomalousPixels";
    case ErrorKind::kEmptyScale: return "EmptyScale";
    case ErrorKind::kDegenerateDistribution: return "DegenerateDistribution";
    case ErrorKind::kDegenerateValidation: return "DegenerateValidation";
    case ErrorKind::kDegenerateLabels: return "DegenerateLabels";
    case ErrorKind::kInsufficientData: return "InsufficientData";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

bool is_input_error(ErrorKind kind) noexcept {
  return kind != ErrorKind::kDegenerateDistribution;
}

}  // namespace anomem
