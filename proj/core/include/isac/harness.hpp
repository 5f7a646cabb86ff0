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

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isac/detector.hpp"
#include "isac/scenario.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// Ground truth and observation of one trial.
struct TrialData {
  std::vector<Target> truth;
  std::vector<Target> clutter;
  double noise_var = 0.0;
  ObservationBlock block;  ///< raw, before any clutter suppression
};

/// Scene draw and synthesis for `sc` (axis value already applied) from a
/// trial seed.
TrialData simulate_trial(const ScenarioConfig& sc, std::uint64_t trial_seed);

struct EstimateOutcome {
  DetectionResult detection;
  std::optional<ParamState> state;        ///< posterior mean, sampler only
  std::optional<double> acceptance_rate;  ///< sampler only
};

/// Applies clutter suppression when configured, then runs `method`.
/// `expected_targets` sets the baseline atom count when the baseline does
/// not fix one.
EstimateOutcome estimate_block(const ScenarioConfig& sc, Method method, const ObservationBlock& raw,
                               std::uint64_t seed, std::size_t expected_targets);

/// True when the matched-filter range profile through the shared velocity
/// and angle of `truth` has a distinct local maximum within `gate_m` of every
/// target.
bool matched_filter_resolves(const ObservationBlock& block, const SystemConfig& cfg,
                             std::span<const Target> truth, double gate_m);

struct MethodOutcome {
  Method method = Method::kSblMcmc;
  DetectionResult detection;
  TrialScore score;
  std::optional<double> acceptance_rate;
  double seconds = 0.0;
};

struct TrialRecord {
  std::size_t axis_index = 0;
  std::size_t trial = 0;
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  std::vector<Target> truth;
  double noise_var = 0.0;
  std::size_t clutter_count = 0;
  std::vector<MethodOutcome> outcomes;    ///< in ScenarioConfig::methods order
  std::optional<Eigen::MatrixXd> fim;     ///< classical information at the truth
  std::optional<bool> mf_resolved;        ///< separated scenes only
};

/// One (axis, trial) cell; reproducible in isolation from its derived seed.
TrialRecord run_trial(const ScenarioConfig& sc, std::size_t axis_index, std::size_t trial);

struct SweepRow {
  double axis_value = 0.0;
  Method method = Method::kSblMcmc;
  double p_cd = 0.0;
  double rmse_range_m = 0.0;
  double rmse_velocity_mps = 0.0;
  double rmse_angle_deg = 0.0;
  std::optional<double> bcrb_range_m;
  std::optional<double> bcrb_velocity_mps;
  std::optional<double> bcrb_angle_deg;
  std::size_t trials = 0;
  std::optional<double> wall_time_s;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kNone;
  std::vector<SweepRow> rows;        ///< axis-major, then method
  std::vector<TrialRecord> records;  ///< axis-major, then trial
};

struct SweepOptions {
  std::size_t threads = 1;
  bool record_time = false;  ///< fill wall_time_s; off keeps output reproducible
  /// Called once per finished trial, serialized.
  std::function<void(const TrialRecord&)> on_trial;
};

SweepResult run_sweep(const ScenarioConfig& sc, const SweepOptions& opts = {});

/// Rows from records; used by run_sweep and by callers that filter records.
std::vector<SweepRow> aggregate(const ScenarioConfig& sc, std::span<const TrialRecord> records,
                                const std::vector<double>& wall_times = {});

/// Square-root Bayesian bound per dimension for one axis value: classical
/// information averaged over the trial scenes plus the prior information.
/// Empty when the information is not invertible.
struct BoundColumns {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double angle_rad = 0.0;
};
std::optional<BoundColumns> scene_bound(const ScenarioConfig& sc,
                                        std::span<const TrialRecord> records);

struct BoundRow {
  double axis_value = 0.0;
  std::optional<BoundColumns> bound;
  std::size_t draws = 0;
};

/// Bound per axis value over `draws` scenes drawn exactly as the sweep draws
/// its trials, so draws == trials reproduces the sweep's bound columns.
std::vector<BoundRow> bound_curve(const ScenarioConfig& sc, std::size_t draws);
std::string format_bound_csv(std::span<const BoundRow> rows);

std::string csv_header();
std::string format_csv(const SweepResult& res);
/// Throws Error(kIo) naming the path.
void write_csv(const SweepResult& res, const std::string& path);

}  // namespace isac
