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

#include "observation_io.hpp"

#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "isac/errors.hpp"
#include "json.hpp"

namespace isac::cli {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

json tensor_to_json(const CTensor3& t) {
  json re = json::array(), im = json::array();
  for (const cplx& v : t.vectorized()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return json{{"subcarriers", t.subcarriers()}, {"symbols", t.symbols()},
              {"antennas", t.antennas()},      {"re", re},
              {"im", im}};
}

CTensor3 tensor_from_json(const json& j, const SystemConfig& cfg, const char* what) {
  const auto m = j.at("subcarriers").get<std::size_t>();
  const auto k = j.at("symbols").get<std::size_t>();
  const auto n = j.at("antennas").get<std::size_t>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != m * k * n || im.size() != m * k * n) {
    throw_input(std::string(what) + ": element count does not match its shape");
  }
  std::vector<cplx> v(m * k * n);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {re[i].get<double>(), im[i].get<double>()};
  CTensor3 t = CTensor3::from_vector(m, k, n, std::move(v));
  if (!t.same_shape(cfg)) throw_input(std::string(what) + ": shape does not match the system");
  return t;
}

json targets_to_json(const std::vector<Target>& ts, const SystemConfig& cfg) {
  json a = json::array();
  for (const auto& t : ts) {
    a.push_back({{"range_m", t.range_m()},
                 {"velocity_mps", t.velocity_mps(cfg.wavelength_m())},
                 {"angle_deg", t.angle_rad / kDeg},
                 {"refl_re", t.refl.real()},
                 {"refl_im", t.refl.imag()}});
  }
  return a;
}

std::vector<Target> targets_from_json(const json& a, const SystemConfig& cfg) {
  std::vector<Target> ts;
  for (const auto& j : a) {
    ts.push_back(Target::from_kinematics(
        j.at("range_m").get<double>(), j.at("velocity_mps").get<double>(),
        j.at("angle_deg").get<double>() * kDeg,
        cplx{j.at("refl_re").get<double>(), j.at("refl_im").get<double>()}, cfg));
  }
  return ts;
}

}  // namespace

std::string observation_to_json(const ObservationFile& f) {
  const SystemConfig& cfg = f.scenario.system;
  json j;
  j["scenario"] = json::parse(scenario_to_json(f.scenario));
  j["trial_seed"] = f.trial_seed;
  j["noise_var"] = f.data.noise_var;
  j["targets"] = targets_to_json(f.data.truth, cfg);
  j["clutter"] = targets_to_json(f.data.clutter, cfg);
  j["tx"] = tensor_to_json(f.data.block.tx);
  j["rx"] = tensor_to_json(f.data.block.rx);
  return j.dump() + "\n";
}

ObservationFile observation_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ObservationFile f;
    f.scenario = parse_scenario(j.at("scenario").dump());
    const SystemConfig& cfg = f.scenario.system;
    f.trial_seed = j.at("trial_seed").get<std::uint64_t>();
    f.data.noise_var = j.at("noise_var").get<double>();
    f.data.truth = targets_from_json(j.at("targets"), cfg);
    f.data.clutter = targets_from_json(j.at("clutter"), cfg);
    f.data.block.tx = tensor_from_json(j.at("tx"), cfg, "tx");
    f.data.block.rx = tensor_from_json(j.at("rx"), cfg, "rx");
    return f;
  } catch (const json::exception& e) {
    throw_input(std::string("observation file: ") + e.what());
  }
}

std::string estimate_to_json(const ScenarioConfig& sc, Method method, const EstimateOutcome& out,
                             const std::vector<Target>* truth) {
  json j;
  j["method"] = std::string(method_name(method));
  json ests = json::array();
  for (std::size_t i = 0; i < out.detection.estimates.size(); ++i) {
    const Estimate& e = out.detection.estimates[i];
    json row{{"range_m", e.range_m},
             {"velocity_mps", e.velocity_mps},
             {"angle_deg", e.angle_rad / kDeg},
             {"refl_re", e.refl.real()},
             {"refl_im", e.refl.imag()}};
    if (i < out.detection.active_slots.size()) row["slot"] = out.detection.active_slots[i];
    ests.push_back(row);
  }
  j["targets"] = ests;
  if (out.acceptance_rate) j["acceptance_rate"] = *out.acceptance_rate;
  if (truth) {
    const TrialScore s = score_trial(*truth, out.detection, sc.resolved_gates(), sc.system);
    json pairs = json::array();
    for (const auto& p : s.pairs) {
      pairs.push_back({{"truth", p.truth},
                       {"estimate", p.estimate},
                       {"range_err_m", p.range_err_m},
                       {"velocity_err_mps", p.velocity_err_mps},
                       {"angle_err_deg", p.angle_err_rad / kDeg}});
    }
    j["score"] = {{"correct_detection", s.correct_detection},
                  {"unmatched_truths", s.unmatched_truths},
                  {"unmatched_estimates", s.unmatched_estimates},
                  {"pairs", pairs}};
  }
  return j.dump(2) + "\n";
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw_io("failed reading '" + path + "'");
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw_io("failed writing to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw_io("failed writing '" + path + "'");
}

}  // namespace isac::cli
