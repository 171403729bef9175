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

#include "mcmcsel/parallel.hpp"

#include <cstdlib>
#include <string>

namespace mcmcsel {

std::size_t default_thread_count() {
  const char* value = std::getenv("MCMCSEL_THREADS");
  if (value == nullptr) return 1;
  try {
    const long parsed = std::stol(value);
    return parsed > 0 ? static_cast<std::size_t>(parsed) : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace mcmcsel
