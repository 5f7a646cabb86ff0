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

#include <optional>
#include <string>
#include <vector>

#include "isac/harness.hpp"

namespace isac::cli {

/// A simulated block plus the scenario that produced it, as written by
/// `isac simulate` and read by `isac estimate`.
struct ObservationFile {
  ScenarioConfig scenario;
  std::uint64_t trial_seed = 0;
  TrialData data;
};

std::string observation_to_json(const ObservationFile& f);
ObservationFile observation_from_json(const std::string& text);

/// Detection report; `truth` adds the trial score when present.
std::string estimate_to_json(const ScenarioConfig& sc, Method method, const EstimateOutcome& out,
                             const std::vector<Target>* truth);

std::string read_text(const std::string& path);
/// Writes `text` to `path`, or to stdout when `path` is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace isac::cli
