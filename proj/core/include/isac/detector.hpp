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

#include <cstddef>
#include <span>
#include <vector>

#include "isac/posterior.hpp"
#include "isac/waveform.hpp"

namespace isac {

struct Estimate {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double angle_rad = 0.0;
  cplx refl{0.0, 0.0};
};

struct SlotSelection {
  std::size_t count = 0;
  std::vector<std::size_t> slots;  ///< descending |b|
};

struct DetectionResult {
  std::vector<std::size_t> active_slots;
  std::vector<Estimate> estimates;

  std::size_t count() const { return estimates.size(); }
};

/// Smallest set of strongest slots holding at least `threshold` of the total
/// coefficient energy. All-zero input yields an empty selection.
/// Throws Error(kInput) unless 0 < threshold <= 1.
SlotSelection detect(std::span<const cplx> coeffs, double threshold);

/// Direct readout of range, velocity and angle for the given slots.
std::vector<Estimate> extract(const ParamState& eta, std::span<const std::size_t> slots,
                              const SystemConfig& cfg);

/// detect() followed by extract().
DetectionResult detect_targets(const ParamState& eta, double threshold, const SystemConfig& cfg);

/// Per-dimension matching tolerances.
struct Gates {
  double range_m = 5.0;
  double velocity_mps = 15.0;
  double angle_rad = 0.1;

  /// Half of each Rayleigh cell.
  static Gates half_cell(const SystemConfig& cfg);
  void validate() const;
};

struct MatchedPair {
  std::size_t truth = 0;
  std::size_t estimate = 0;
  double range_err_m = 0.0;
  double velocity_err_mps = 0.0;
  double angle_err_rad = 0.0;
};

struct TrialScore {
  bool correct_detection = false;
  std::vector<MatchedPair> pairs;
  std::size_t unmatched_truths = 0;
  std::size_t unmatched_estimates = 0;
  double total_cost = 0.0;
};

/// One-to-one assignment maximizing the number of gate-feasible matches and,
/// among those, minimizing the summed gate-normalized squared distance.
/// Exact for up to six matches, greedy above.
TrialScore score_trial(std::span<const Target> truth, const DetectionResult& det,
                       const Gates& gates, const SystemConfig& cfg);

/// Running sums of squared errors over matched pairs.
class ErrorAccumulator {
 public:
  void add(const TrialScore& score);
  void add_pair(const MatchedPair& pair);
  void merge(const ErrorAccumulator& other);

  std::size_t count() const { return count_; }
  double rmse_range_m() const;
  double rmse_velocity_mps() const;
  double rmse_angle_rad() const;

 private:
  std::size_t count_ = 0;
  double sq_range_ = 0.0;
  double sq_velocity_ = 0.0;
  double sq_angle_ = 0.0;
};

}  // namespace isac
