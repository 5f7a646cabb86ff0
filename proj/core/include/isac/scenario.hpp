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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isac/clutter.hpp"
#include "isac/detector.hpp"
#include "isac/posterior.hpp"
#include "isac/sampler.hpp"
#include "isac/waveform.hpp"

namespace isac {

enum class Method { kSblMcmc, kOmp, kPeriodogram };
enum class AmplitudeModel {
  kEqual,          ///< |b| = 1 for every target
  kRadarEquation,  ///< |b| = sqrt(rcs) (50 m / r)^2
};
enum class SweepAxis { kNone, kSnrDb, kScnrDb, kSeparationM };

std::string_view method_name(Method m);
std::string_view amplitude_model_name(AmplitudeModel a);
std::string_view sweep_axis_name(SweepAxis a);
/// Throw Error(kConfig) on unknown names.
Method parse_method(std::string_view name);
AmplitudeModel parse_amplitude_model(std::string_view name);
SweepAxis parse_sweep_axis(std::string_view name);

/// Distribution of the dynamic targets of one trial.
struct SceneSpec {
  std::size_t targets = 1;
  Interval range_m{50.0, 600.0};
  Interval speed_mps{5.0, 30.0};  ///< |v|; the sign is drawn uniformly
  Interval angle_rad{-80.0 * std::numbers::pi / 180.0, 80.0 * std::numbers::pi / 180.0};
  AmplitudeModel amplitude = AmplitudeModel::kEqual;
  double rcs_ratio = 1.0;
  /// When positive, targets share velocity and angle and sit on a line in
  /// range spaced by this distance.
  double separation_m = 0.0;
  double snr_db = 20.0;
  double scnr_db = -10.0;  ///< used when clutter is enabled

  void validate() const;
};

struct ClutterSetup {
  bool enabled = false;
  ClutterConfig config;
  bool suppress = true;
  /// Repeat the transmit symbols across OFDM symbols, so static scatterers
  /// give a constant stream that the recursive filter can remove.
  bool repeat_symbols = true;
  /// Rescale the generated clutter to hit SceneSpec::scnr_db.
  bool calibrate_scnr = true;
};

struct BaselineSetup {
  double points_per_cell = 1.0;
  std::size_t max_targets = 0;  ///< 0: the scene's target count
  double residual_tol = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  SystemConfig system;
  SceneSpec scene;
  /// Physical prior box; defaults to the scene box with velocities of either sign.
  std::optional<Interval> prior_range_m;
  std::optional<Interval> prior_velocity_mps;
  std::optional<Interval> prior_angle_rad;
  std::size_t slots = 10;
  GammaPrior rho{2.0, 0.01};
  GammaPrior xi{3.0, 0.01};
  SamplerConfig sampler;
  ClutterSetup clutter;
  BaselineSetup baseline;
  double detection_threshold = 0.9;
  std::optional<Gates> gates;  ///< default: half Rayleigh cell, range gate half the separation
  std::vector<Method> methods{Method::kSblMcmc};
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> values;  ///< axis values; ignored for kNone
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  bool bounds = true;

  /// Prior over the resolved box.
  PriorConfig prior() const;
  /// Geometry of the data actually passed to the estimators.
  SystemConfig estimation_system() const;
  Gates resolved_gates() const;
  /// Axis values, or a single placeholder for kNone.
  std::vector<double> axis_values() const;
  /// Copy with the axis value applied to the scene.
  ScenarioConfig at(double axis_value) const;
  /// Throws Error(kConfig) with the offending field.
  void validate() const;
};

/// Strict JSON reader: unknown fields and wrong types raise Error(kConfig)
/// naming the field path.
ScenarioConfig parse_scenario(std::string_view json_text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& sc);

/// Built-in experiments: "single-target", "three-target", "detection",
/// "super-resolution", "clutter". Throws Error(kConfig) on unknown names.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Draws the dynamic targets of one trial.
std::vector<Target> draw_targets(const SceneSpec& spec, const SystemConfig& cfg, Rng& rng);

}  // namespace isac
