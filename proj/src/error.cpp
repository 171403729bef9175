// Copyright 2026 The mcmcsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mcmcsel/error.hpp"

namespace mcmcsel {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOutOfSupport: return "OutOfSupport";
    case ErrorCode::kNotDirectlySamplable: return "NotDirectlySamplable";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kDegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::kKTooLarge: return "KTooLarge";
    case ErrorCode::kZeroDistance: return "ZeroDistance";
    case ErrorCode::kNonIntegrable: return "NonIntegrable";
    case ErrorCode::kAlphaOutOfTheoremRange: return "AlphaOutOfTheoremRange";
    case ErrorCode::kGammaPole: return "GammaPole";
    case ErrorCode::kNonPositiveM: return "NonPositiveM";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mcmcsel
