// SPDX-License-Identifier: Apache-2.0
//
// gridless-isac: sparse Bayesian ISAC receiver and benchmark harness
// Copyright (C) 2026 The gridless-isac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "isac/errors.hpp"

namespace isac {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kInput:
      return "input";
    case ErrorCategory::kIo:
      return "io";
    case ErrorCategory::kNumeric:
      return "numeric";
  }
  return "unknown";
}

void throw_config(const std::string& what) { throw Error(ErrorCategory::kConfig, what); }
void throw_input(const std::string& what) { throw Error(ErrorCategory::kInput, what); }
void throw_io(const std::string& what) { throw Error(ErrorCategory::kIo, what); }
void throw_numeric(const std::string& what) { throw Error(ErrorCategory::kNumeric, what); }

}  // namespace isac
