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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isac {

/// Coarse failure classes. The CLI prints the category name as the first
/// token of its one-line error report.
enum class ErrorCategory {
  kConfig,   ///< invalid or inconsistent configuration
  kInput,    ///< malformed input data (shapes, ranges)
  kIo,       ///< filesystem failures
  kNumeric,  ///< singular matrices, non-finite values
};

std::string_view category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] void throw_config(const std::string& what);
[[noreturn]] void throw_input(const std::string& what);
[[noreturn]] void throw_io(const std::string& what);
[[noreturn]] void throw_numeric(const std::string& what);

}  // namespace isac
