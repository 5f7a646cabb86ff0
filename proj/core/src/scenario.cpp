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

#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "isac/errors.hpp"
#include "json.hpp"

namespace isac {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

template <typename E, std::size_t N>
E parse_enum(std::string_view name, const std::pair<E, std::string_view> (&table)[N],
             std::string_view what) {
  for (const auto& [value, label] : table) {
    if (label == name) return value;
  }
  std::string known;
  for (const auto& entry : table) {
    if (!known.empty()) known += ", ";
    known += entry.second;
  }
  throw_config("unknown " + std::string(what) + " '" + std::string(name) + "' (expected one of " +
               known + ")");
}

template <typename E, std::size_t N>
std::string_view enum_name(E v, const std::pair<E, std::string_view> (&table)[N]) {
  for (const auto& [value, label] : table) {
    if (value == v) return label;
  }
  return "?";
}

constexpr std::pair<Method, std::string_view> kMethods[] = {
    {Method::kSblMcmc, "sbl-mcmc"}, {Method::kOmp, "omp"}, {Method::kPeriodogram, "periodogram"}};
constexpr std::pair<AmplitudeModel, std::string_view> kAmplitudes[] = {
    {AmplitudeModel::kEqual, "equal"}, {AmplitudeModel::kRadarEquation, "radar_equation"}};
constexpr std::pair<SweepAxis, std::string_view> kAxes[] = {{SweepAxis::kNone, "none"},
                                                             {SweepAxis::kSnrDb, "snr_db"},
                                                             {SweepAxis::kScnrDb, "scnr_db"},
                                                             {SweepAxis::kSeparationM, "separation_m"}};

}  // namespace

std::string_view method_name(Method m) { return enum_name(m, kMethods); }
std::string_view amplitude_model_name(AmplitudeModel a) { return enum_name(a, kAmplitudes); }
std::string_view sweep_axis_name(SweepAxis a) { return enum_name(a, kAxes); }
Method parse_method(std::string_view name) { return parse_enum(name, kMethods, "method"); }
AmplitudeModel parse_amplitude_model(std::string_view name) {
  return parse_enum(name, kAmplitudes, "amplitude model");
}
SweepAxis parse_sweep_axis(std::string_view name) { return parse_enum(name, kAxes, "sweep axis"); }

void SceneSpec::validate() const {
  if (targets < 1 || targets > 5) throw_config("scene.targets must lie in [1, 5]");
  if (!(range_m.lo > 0.0 && range_m.lo < range_m.hi)) throw_config("scene.range_m: need 0 < lo < hi");
  if (!(speed_mps.lo >= 0.0 && speed_mps.lo <= speed_mps.hi)) {
    throw_config("scene.speed_mps: need 0 <= lo <= hi");
  }
  if (!(angle_rad.lo < angle_rad.hi && angle_rad.lo > -0.5 * std::numbers::pi &&
        angle_rad.hi < 0.5 * std::numbers::pi)) {
    throw_config("scene.angle_deg: need -90 < lo < hi < 90");
  }
  if (!(rcs_ratio > 0.0)) throw_config("scene.rcs_ratio must be positive");
  if (!(separation_m >= 0.0)) throw_config("scene.separation_m must be non-negative");
  if (separation_m > 0.0) {
    if (targets < 2) throw_config("scene.separation_m needs at least two targets");
    if (separation_m * static_cast<double>(targets - 1) >= range_m.width()) {
      throw_config("scene.separation_m: the target line does not fit in scene.range_m");
    }
  }
  if (!std::isfinite(snr_db)) throw_config("scene.snr_db must be finite");
  if (!std::isfinite(scnr_db)) throw_config("scene.scnr_db must be finite");
}

PriorConfig ScenarioConfig::prior() const {
  const double lam = system.wavelength_m();
  const Interval r = prior_range_m.value_or(scene.range_m);
  const Interval v = prior_velocity_mps.value_or(Interval{-scene.speed_mps.hi, scene.speed_mps.hi});
  const Interval a = prior_angle_rad.value_or(scene.angle_rad);
  PriorConfig pc = PriorConfig::from_bounds(
      slots, {delay_from_range(r.lo), delay_from_range(r.hi)},
      {doppler_from_velocity(v.lo, lam), doppler_from_velocity(v.hi, lam)}, a);
  pc.rho = rho;
  pc.xi = xi;
  return pc;
}

SystemConfig ScenarioConfig::estimation_system() const {
  if (clutter.enabled && clutter.suppress) {
    return with_symbols(system, system.n_symbols - clutter.config.transient_symbols);
  }
  return system;
}

Gates ScenarioConfig::resolved_gates() const {
  if (gates) return *gates;
  Gates g = Gates::half_cell(system);
  if (scene.separation_m > 0.0) g.range_m = 0.5 * scene.separation_m;
  return g;
}

std::vector<double> ScenarioConfig::axis_values() const {
  if (axis == SweepAxis::kNone) return {0.0};
  return values;
}

ScenarioConfig ScenarioConfig::at(double axis_value) const {
  ScenarioConfig out = *this;
  switch (axis) {
    case SweepAxis::kNone: break;
    case SweepAxis::kSnrDb: out.scene.snr_db = axis_value; break;
    case SweepAxis::kScnrDb: out.scene.scnr_db = axis_value; break;
    case SweepAxis::kSeparationM: out.scene.separation_m = axis_value; break;
  }
  return out;
}

void ScenarioConfig::validate() const {
  system.validate();
  scene.validate();
  if (slots < 1) throw_config("prior.slots must be at least 1");
  const PriorConfig pc = prior();
  pc.validate();
  // Every scene support must sit inside the prior support.
  const double lam = system.wavelength_m();
  if (delay_from_range(scene.range_m.lo) < pc.delay.support.lo ||
      delay_from_range(scene.range_m.hi) > pc.delay.support.hi) {
    throw_config("prior.range_m must contain scene.range_m");
  }
  if (doppler_from_velocity(scene.speed_mps.hi, lam) > pc.doppler.support.hi ||
      doppler_from_velocity(-scene.speed_mps.hi, lam) < pc.doppler.support.lo) {
    throw_config("prior.velocity_mps must contain +-scene.speed_mps");
  }
  if (scene.angle_rad.lo < pc.angle.support.lo || scene.angle_rad.hi > pc.angle.support.hi) {
    throw_config("prior.angle_deg must contain scene.angle_deg");
  }
  if (clutter.enabled) {
    clutter.config.validate(system);
    if (clutter.suppress && system.n_symbols <= clutter.config.transient_symbols) {
      throw_config("clutter.transient_symbols must be below system.symbols");
    }
    const double v_max = std::max(std::abs(clutter.config.velocity_mps.lo),
                                  std::abs(clutter.config.velocity_mps.hi));
    if (doppler_from_velocity(v_max, lam) > pc.doppler.support.hi) {
      throw_config("prior.velocity_mps must contain clutter.velocity_mps");
    }
  }
  sampler.validate(estimation_system().data_size());
  if (!(detection_threshold > 0.0 && detection_threshold <= 1.0)) {
    throw_config("detection.threshold must lie in (0, 1]");
  }
  if (gates) gates->validate();
  if (!(baseline.points_per_cell > 0.0)) throw_config("baseline.points_per_cell must be positive");
  if (!(baseline.residual_tol >= 0.0)) throw_config("baseline.residual_tol must be non-negative");
  if (methods.empty()) throw_config("methods must list at least one estimator");
  if (trials < 1) throw_config("trials must be at least 1");
  if (axis != SweepAxis::kNone && values.empty()) throw_config("sweep.values must not be empty");
  for (double v : axis_values()) at(v).scene.validate();
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

// Object view that records consumed keys, so leftovers can be rejected.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw_config(where("") + ": expected an object");
  }
  ~Fields() = default;

  std::string where(const std::string& key) const {
    return path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw_config(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  template <typename U>
  void count(const std::string& key, U& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        throw_config(where(key) + ": expected a non-negative integer");
      }
      out = static_cast<U>(v->get<unsigned long long>());
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw_config(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void text(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw_config(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  // [lo, hi] pair, scaled into internal units.
  void interval(const std::string& key, Interval& out, double scale = 1.0) {
    if (const json* v = find(key)) out = to_interval(*v, key, scale);
  }
  void interval(const std::string& key, std::optional<Interval>& out, double scale = 1.0) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        out = to_interval(*v, key, scale);
      }
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw_config(where(it.key()) + ": unknown field");
    }
  }

 private:
  Interval to_interval(const json& v, const std::string& key, double scale) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw_config(where(key) + ": expected [lo, hi]");
    }
    return {v[0].get<double>() * scale, v[1].get<double>() * scale};
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_system(const json& j, SystemConfig& s) {
  Fields f(j, "system");
  f.count("antennas", s.n_antennas);
  f.count("subcarriers", s.n_subcarriers);
  f.count("symbols", s.n_symbols);
  f.number("carrier_hz", s.carrier_hz);
  f.number("subcarrier_hz", s.subcarrier_hz);
  f.number("cp_fraction", s.cp_fraction);
  f.finish();
}

void read_scene(const json& j, SceneSpec& s) {
  Fields f(j, "scene");
  f.count("targets", s.targets);
  f.interval("range_m", s.range_m);
  f.interval("speed_mps", s.speed_mps);
  f.interval("angle_deg", s.angle_rad, kDeg);
  std::string amp(amplitude_model_name(s.amplitude));
  f.text("amplitude", amp);
  s.amplitude = parse_amplitude_model(amp);
  f.number("rcs_ratio", s.rcs_ratio);
  f.number("separation_m", s.separation_m);
  f.number("snr_db", s.snr_db);
  f.number("scnr_db", s.scnr_db);
  f.finish();
}

void read_prior(const json& j, ScenarioConfig& sc) {
  Fields f(j, "prior");
  f.count("slots", sc.slots);
  f.interval("range_m", sc.prior_range_m);
  f.interval("velocity_mps", sc.prior_velocity_mps);
  f.interval("angle_deg", sc.prior_angle_rad, kDeg);
  f.number("rho_shape", sc.rho.shape);
  f.number("rho_rate", sc.rho.rate);
  f.number("xi_shape", sc.xi.shape);
  f.number("xi_rate", sc.xi.rate);
  f.finish();
}

void read_sampler(const json& j, SamplerConfig& s) {
  Fields f(j, "sampler");
  f.count("batch_size", s.batch_size);
  f.number("step0", s.step0);
  f.number("beta1", s.beta1);
  f.number("beta2", s.beta2);
  f.number("eps_stab", s.eps_stab);
  f.count("burn_in", s.n_burn);
  f.count("samples", s.n_samples);
  f.number("upsilon", s.upsilon);
  f.count("chains", s.chains);
  std::string init(init_mode_name(s.init)), scaling(scaling_name(s.scaling));
  f.text("init", init);
  f.text("scaling", scaling);
  s.init = parse_init_mode(init);
  s.scaling = parse_scaling(scaling);
  f.number("curvature_gain", s.curvature_gain);
  f.number("max_unit_cells", s.max_unit_cells);
  f.number("init_points_per_cell", s.init_points_per_cell);
  f.boolean("normalize_power", s.normalize_power);
  f.finish();
}

void read_clutter(const json& j, ClutterSetup& c) {
  Fields f(j, "clutter");
  f.boolean("enabled", c.enabled);
  f.count("count_min", c.config.count_min);
  f.count("count_max", c.config.count_max);
  f.interval("velocity_mps", c.config.velocity_mps);
  f.interval("range_m", c.config.range_m);
  f.interval("angle_deg", c.config.angle_rad, kDeg);
  f.number("gain", c.config.gain);
  f.number("alpha", c.config.alpha);
  f.count("transient_symbols", c.config.transient_symbols);
  f.boolean("suppress", c.suppress);
  f.boolean("repeat_symbols", c.repeat_symbols);
  f.boolean("calibrate_scnr", c.calibrate_scnr);
  f.finish();
}

void read_baseline(const json& j, BaselineSetup& b) {
  Fields f(j, "baseline");
  f.number("points_per_cell", b.points_per_cell);
  f.count("max_targets", b.max_targets);
  f.number("residual_tol", b.residual_tol);
  f.finish();
}

void read_detection(const json& j, ScenarioConfig& sc) {
  Fields f(j, "detection");
  f.number("threshold", sc.detection_threshold);
  const json* g = f.find("gates");
  if (g && !g->is_null()) {
    Fields gf(*g, "detection.gates");
    Gates gates = Gates::half_cell(sc.system);
    gf.number("range_m", gates.range_m);
    gf.number("velocity_mps", gates.velocity_mps);
    double deg = gates.angle_rad / kDeg;
    gf.number("angle_deg", deg);
    gates.angle_rad = deg * kDeg;
    gf.finish();
    sc.gates = gates;
  }
  f.finish();
}

void read_sweep(const json& j, ScenarioConfig& sc) {
  Fields f(j, "sweep");
  std::string axis(sweep_axis_name(sc.axis));
  f.text("axis", axis);
  sc.axis = parse_sweep_axis(axis);
  if (const json* v = f.find("values")) {
    if (!v->is_array()) throw_config("sweep.values: expected an array of numbers");
    sc.values.clear();
    for (const auto& x : *v) {
      if (!x.is_number()) throw_config("sweep.values: expected an array of numbers");
      sc.values.push_back(x.get<double>());
    }
  }
  f.finish();
}

json interval_json(const Interval& iv, double scale = 1.0) {
  return json::array({iv.lo / scale, iv.hi / scale});
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw_config(std::string("config is not valid JSON: ") + e.what());
  }
  ScenarioConfig sc;
  Fields f(j, "");
  f.text("name", sc.name);
  // The system block comes first: gate defaults depend on it.
  if (const json* v = f.find("system")) read_system(*v, sc.system);
  if (const json* v = f.find("scene")) read_scene(*v, sc.scene);
  if (const json* v = f.find("prior")) read_prior(*v, sc);
  if (const json* v = f.find("sampler")) read_sampler(*v, sc.sampler);
  if (const json* v = f.find("clutter")) read_clutter(*v, sc.clutter);
  if (const json* v = f.find("baseline")) read_baseline(*v, sc.baseline);
  if (const json* v = f.find("detection")) read_detection(*v, sc);
  if (const json* v = f.find("methods")) {
    if (!v->is_array() || v->empty()) throw_config("methods: expected a non-empty array of names");
    sc.methods.clear();
    for (const auto& m : *v) {
      if (!m.is_string()) throw_config("methods: expected a non-empty array of names");
      sc.methods.push_back(parse_method(m.get<std::string>()));
    }
  }
  if (const json* v = f.find("sweep")) read_sweep(*v, sc);
  f.count("trials", sc.trials);
  f.count("seed", sc.seed);
  f.boolean("bounds", sc.bounds);
  f.finish();
  sc.validate();
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_io("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw_io("failed reading config '" + path + "'");
  return parse_scenario(text.str());
}

std::string scenario_to_json(const ScenarioConfig& sc) {
  json j;
  j["name"] = sc.name;
  j["system"] = {{"antennas", sc.system.n_antennas},       {"subcarriers", sc.system.n_subcarriers},
                 {"symbols", sc.system.n_symbols},         {"carrier_hz", sc.system.carrier_hz},
                 {"subcarrier_hz", sc.system.subcarrier_hz}, {"cp_fraction", sc.system.cp_fraction}};
  j["scene"] = {{"targets", sc.scene.targets},
                {"range_m", interval_json(sc.scene.range_m)},
                {"speed_mps", interval_json(sc.scene.speed_mps)},
                {"angle_deg", interval_json(sc.scene.angle_rad, kDeg)},
                {"amplitude", amplitude_model_name(sc.scene.amplitude)},
                {"rcs_ratio", sc.scene.rcs_ratio},
                {"separation_m", sc.scene.separation_m},
                {"snr_db", sc.scene.snr_db},
                {"scnr_db", sc.scene.scnr_db}};
  json prior = {{"slots", sc.slots},
                {"rho_shape", sc.rho.shape},
                {"rho_rate", sc.rho.rate},
                {"xi_shape", sc.xi.shape},
                {"xi_rate", sc.xi.rate}};
  if (sc.prior_range_m) prior["range_m"] = interval_json(*sc.prior_range_m);
  if (sc.prior_velocity_mps) prior["velocity_mps"] = interval_json(*sc.prior_velocity_mps);
  if (sc.prior_angle_rad) prior["angle_deg"] = interval_json(*sc.prior_angle_rad, kDeg);
  j["prior"] = prior;
  const SamplerConfig& s = sc.sampler;
  j["sampler"] = {{"batch_size", s.batch_size},
                  {"step0", s.step0},
                  {"beta1", s.beta1},
                  {"beta2", s.beta2},
                  {"eps_stab", s.eps_stab},
                  {"burn_in", s.n_burn},
                  {"samples", s.n_samples},
                  {"upsilon", s.upsilon},
                  {"chains", s.chains},
                  {"init", init_mode_name(s.init)},
                  {"scaling", scaling_name(s.scaling)},
                  {"curvature_gain", s.curvature_gain},
                  {"max_unit_cells", s.max_unit_cells},
                  {"init_points_per_cell", s.init_points_per_cell},
                  {"normalize_power", s.normalize_power}};
  const ClutterConfig& c = sc.clutter.config;
  j["clutter"] = {{"enabled", sc.clutter.enabled},
                  {"count_min", c.count_min},
                  {"count_max", c.count_max},
                  {"velocity_mps", interval_json(c.velocity_mps)},
                  {"range_m", interval_json(c.range_m)},
                  {"angle_deg", interval_json(c.angle_rad, kDeg)},
                  {"gain", c.gain},
                  {"alpha", c.alpha},
                  {"transient_symbols", c.transient_symbols},
                  {"suppress", sc.clutter.suppress},
                  {"repeat_symbols", sc.clutter.repeat_symbols},
                  {"calibrate_scnr", sc.clutter.calibrate_scnr}};
  j["baseline"] = {{"points_per_cell", sc.baseline.points_per_cell},
                   {"max_targets", sc.baseline.max_targets},
                   {"residual_tol", sc.baseline.residual_tol}};
  json det = {{"threshold", sc.detection_threshold}};
  if (sc.gates) {
    det["gates"] = {{"range_m", sc.gates->range_m},
                    {"velocity_mps", sc.gates->velocity_mps},
                    {"angle_deg", sc.gates->angle_rad / kDeg}};
  }
  j["detection"] = det;
  json methods = json::array();
  for (Method m : sc.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["sweep"] = {{"axis", sweep_axis_name(sc.axis)}, {"values", sc.values}};
  j["trials"] = sc.trials;
  j["seed"] = sc.seed;
  j["bounds"] = sc.bounds;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Presets

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig sc;
  sc.name = std::string(name);
  if (name == "single-target") {
    sc.axis = SweepAxis::kSnrDb;
    sc.values = {-10.0, 0.0, 10.0, 20.0};
    sc.trials = 200;
  } else if (name == "three-target") {
    sc.scene.targets = 3;
    sc.axis = SweepAxis::kSnrDb;
    sc.values = {-10.0, 0.0, 10.0, 20.0};
    sc.trials = 200;
  } else if (name == "detection") {
    sc.axis = SweepAxis::kSnrDb;
    sc.values = {-20.0, -15.0, -10.0, -5.0, 0.0};
    sc.trials = 200;
    sc.bounds = false;
  } else if (name == "super-resolution") {
    sc.scene.targets = 2;
    sc.scene.snr_db = 10.0;
    sc.axis = SweepAxis::kSeparationM;
    sc.values = {5.0};
    sc.trials = 50;
  } else if (name == "clutter") {
    sc.system.n_symbols = 128;
    sc.scene.snr_db = 10.0;
    sc.clutter.enabled = true;
    sc.axis = SweepAxis::kScnrDb;
    sc.values = {-10.0};
    sc.trials = 50;
    sc.bounds = false;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw_config("unknown preset '" + std::string(name) + "' (expected one of " + known + ")");
  }
  sc.validate();
  return sc;
}

std::vector<std::string> preset_names() {
  return {"single-target", "three-target", "detection", "super-resolution", "clutter"};
}

// ---------------------------------------------------------------------------
// Scene draws

std::vector<Target> draw_targets(const SceneSpec& spec, const SystemConfig& cfg, Rng& rng) {
  spec.validate();
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  std::uniform_real_distribution<double> speed(spec.speed_mps.lo, spec.speed_mps.hi);
  std::uniform_real_distribution<double> angle(spec.angle_rad.lo, spec.angle_rad.hi);
  std::bernoulli_distribution negative(0.5);
  auto magnitude = [&](double r) {
    return spec.amplitude == AmplitudeModel::kEqual ? 1.0 : radar_equation_amplitude(r, spec.rcs_ratio);
  };

  std::vector<Target> out;
  out.reserve(spec.targets);
  if (spec.separation_m > 0.0) {
    const double span = spec.separation_m * static_cast<double>(spec.targets - 1);
    std::uniform_real_distribution<double> first(spec.range_m.lo, spec.range_m.hi - span);
    const double r0 = first(rng);
    const double v = speed(rng) * (negative(rng) ? -1.0 : 1.0);
    const double th = angle(rng);
    for (std::size_t l = 0; l < spec.targets; ++l) {
      const double r = r0 + spec.separation_m * static_cast<double>(l);
      out.push_back(Target::from_kinematics(r, v, th, std::polar(magnitude(r), phase(rng)), cfg));
    }
    return out;
  }
  std::uniform_real_distribution<double> range(spec.range_m.lo, spec.range_m.hi);
  for (std::size_t l = 0; l < spec.targets; ++l) {
    const double r = range(rng);
    const double v = speed(rng) * (negative(rng) ? -1.0 : 1.0);
    const double th = angle(rng);
    out.push_back(Target::from_kinematics(r, v, th, std::polar(magnitude(r), phase(rng)), cfg));
  }
  return out;
}

}  // namespace isac
