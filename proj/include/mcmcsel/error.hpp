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

#ifndef MCMCSEL_ERROR_HPP
#define MCMCSEL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcmcsel {

/// Error classes surfaced by the library. The CLI maps each class to a
/// distinct exit status.
enum class ErrorCode {
  kDimensionMismatch,
  kOutOfSupport,
  kNotDirectlySamplable,
  kInvalidSpec,
  kConfigMismatch,
  kDegenerateCovariance,
  kKTooLarge,
  kZeroDistance,
  kNonIntegrable,
  kAlphaOutOfTheoremRange,
  kGammaPole,
  kNonPositiveM,
  kTooFewPoints,
  kParseError,
  kValidationError,
  kIoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mcmcsel

#endif  // MCMCSEL_ERROR_HPP
