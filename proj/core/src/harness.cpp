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

#include "isac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "isac/baselines.hpp"
#include "isac/bcrb.hpp"
#include "isac/clutter.hpp"
#include "isac/errors.hpp"
#include "isac/sampler.hpp"

namespace isac {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Scales the clutter so that the target-to-(clutter + noise) power ratio hits scnr_db.
void calibrate_clutter(std::vector<Target>& clutter, double p_target, double noise_var,
                       double scnr_db, const CTensor3& tx, const SystemConfig& cfg) {
  const double p_wanted = p_target / std::pow(10.0, scnr_db / 10.0) - noise_var;
  if (!(p_wanted > 0.0)) {
    throw_config("scene.scnr_db is not below the target SNR; no clutter power can reach it");
  }
  const double p_raw = mean_power(noiseless_echo(clutter, tx, cfg));
  if (!(p_raw > 0.0)) throw_numeric("generated clutter has zero power");
  const double g = std::sqrt(p_wanted / p_raw);
  for (auto& c : clutter) c.refl *= g;
}

GridSpec baseline_grid(const ScenarioConfig& sc, const SystemConfig& cfg) {
  const PriorConfig pc = sc.prior();
  return GridSpec::per_cell(cfg, pc.delay.support, pc.doppler.support, pc.angle.support,
                            sc.baseline.points_per_cell);
}

}  // namespace

TrialData simulate_trial(const ScenarioConfig& sc, std::uint64_t trial_seed) {
  Rng rng(trial_seed);
  TrialData d;
  d.truth = draw_targets(sc.scene, sc.system, rng);
  const CTensor3 tx = sc.clutter.enabled && sc.clutter.repeat_symbols
                          ? generate_repeated_symbols(sc.system, rng)
                          : generate_symbols(sc.system, rng);
  d.noise_var = noise_var_for_snr(sc.scene.snr_db, d.truth, tx, sc.system);
  if (sc.clutter.enabled) {
    d.clutter = generate_clutter(sc.clutter.config, sc.system, rng);
    if (sc.clutter.calibrate_scnr) {
      const double p_target = mean_power(noiseless_echo(d.truth, tx, sc.system));
      calibrate_clutter(d.clutter, p_target, d.noise_var, sc.scene.scnr_db, tx, sc.system);
    }
  }
  const Scene scene{d.truth, d.clutter, d.noise_var};
  d.block = synthesize(scene, tx, sc.system, rng);
  return d;
}

EstimateOutcome estimate_block(const ScenarioConfig& sc, Method method, const ObservationBlock& raw,
                               std::uint64_t seed, std::size_t expected_targets) {
  ObservationBlock block = raw;
  SystemConfig cfg = sc.system;
  if (sc.clutter.enabled && sc.clutter.suppress) {
    SuppressedBlock s =
        suppress_block(raw, sc.system, sc.clutter.config.alpha, sc.clutter.config.transient_symbols);
    block = std::move(s.block);
    cfg = s.cfg;
  }
  const std::size_t n_atoms = sc.baseline.max_targets > 0 ? sc.baseline.max_targets : expected_targets;

  EstimateOutcome out;
  switch (method) {
    case Method::kSblMcmc: {
      SamplerConfig smp = sc.sampler;
      smp.seed = seed;
      ChainResult res = run_chains(block.y(), block.tx, cfg, sc.prior(), smp);
      out.detection = detect_targets(res.estimate, sc.detection_threshold, cfg);
      out.acceptance_rate = res.diagnostics.acceptance_rate;
      out.state = std::move(res.estimate);
      break;
    }
    case Method::kOmp: {
      OmpStop stop;
      stop.max_targets = n_atoms;
      stop.residual_tol = sc.baseline.residual_tol;
      out.detection = omp(block.y(), block.tx, cfg, baseline_grid(sc, cfg), stop).detection;
      break;
    }
    case Method::kPeriodogram: {
      const PowerMap map = periodogram(block.y(), block.tx, cfg, baseline_grid(sc, cfg), n_atoms);
      const double lam = cfg.wavelength_m();
      for (std::size_t i = 0; i < map.peaks.size(); ++i) {
        const Peak& p = map.peaks[i];
        out.detection.active_slots.push_back(i);
        out.detection.estimates.push_back(Estimate{range_from_delay(p.point.delay_s),
                                                   velocity_from_doppler(p.point.doppler_hz, lam),
                                                   p.point.angle_rad, cplx{std::sqrt(p.power), 0.0}});
      }
      break;
    }
  }
  return out;
}

bool matched_filter_resolves(const ObservationBlock& block, const SystemConfig& cfg,
                             std::span<const Target> truth, double gate_m) {
  if (truth.empty()) return true;
  const RayleighCells cells = rayleigh_cells(cfg);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& t : truth) {
    lo = std::min(lo, t.delay_s);
    hi = std::max(hi, t.delay_s);
  }
  const Interval window{std::max(lo - 2.0 * cells.delay_s, 0.0), hi + 2.0 * cells.delay_s};
  // About 64 samples per cell: the profile is smooth at that density.
  const auto n = static_cast<std::size_t>(std::ceil(64.0 * window.width() / cells.delay_s)) + 1;
  const std::vector<double> maxima = range_cut_maxima(block.y(), block.tx, cfg, window, n,
                                                      truth.front().doppler_hz, truth.front().angle_rad);
  // Greedy: nearest unused maximum per target, targets in range order.
  std::vector<double> ranges;
  for (const auto& t : truth) ranges.push_back(t.range_m());
  std::sort(ranges.begin(), ranges.end());
  std::vector<bool> used(maxima.size(), false);
  for (double r : ranges) {
    std::size_t best = maxima.size();
    for (std::size_t i = 0; i < maxima.size(); ++i) {
      if (used[i] || std::abs(maxima[i] - r) > gate_m) continue;
      if (best == maxima.size() || std::abs(maxima[i] - r) < std::abs(maxima[best] - r)) best = i;
    }
    if (best == maxima.size()) return false;
    used[best] = true;
  }
  return true;
}

TrialRecord run_trial(const ScenarioConfig& base, std::size_t axis_index, std::size_t trial) {
  const std::vector<double> axis = base.axis_values();
  if (axis_index >= axis.size()) throw_input("run_trial: axis index out of range");
  const ScenarioConfig sc = base.at(axis[axis_index]);

  TrialRecord rec;
  rec.axis_index = axis_index;
  rec.trial = trial;
  rec.axis_value = axis[axis_index];
  rec.seed = derive_seed(sc.seed, axis_index, trial);
  const TrialData data = simulate_trial(sc, rec.seed);
  rec.truth = data.truth;
  rec.noise_var = data.noise_var;
  rec.clutter_count = data.clutter.size();

  const Gates gates = sc.resolved_gates();
  for (std::size_t i = 0; i < sc.methods.size(); ++i) {
    MethodOutcome mo;
    mo.method = sc.methods[i];
    const auto t0 = std::chrono::steady_clock::now();
    EstimateOutcome est =
        estimate_block(sc, mo.method, data.block, derive_seed(rec.seed, 1, i), data.truth.size());
    mo.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    mo.detection = std::move(est.detection);
    mo.acceptance_rate = est.acceptance_rate;
    mo.score = score_trial(data.truth, mo.detection, gates, sc.system);
    rec.outcomes.push_back(std::move(mo));
  }
  if (sc.bounds && !sc.clutter.enabled) {
    rec.fim = classical_fim(data.truth, data.block.tx, 1.0 / data.noise_var, sc.system).matrix;
  }
  if (sc.scene.separation_m > 0.0) {
    rec.mf_resolved = matched_filter_resolves(data.block, sc.system, data.truth, gates.range_m);
  }
  return rec;
}

std::optional<BoundColumns> scene_bound(const ScenarioConfig& sc,
                                        std::span<const TrialRecord> records) {
  if (records.empty()) return std::nullopt;
  const std::size_t L = sc.scene.targets;
  FimAverager avg(L);
  for (const auto& r : records) {
    if (!r.fim) return std::nullopt;
    FimBlock f;
    f.matrix = *r.fim;
    f.targets = L;
    avg.add(f);
  }
  try {
    const BcrbReport rep = bound_from_information(avg.mean() + prior_fim(sc.prior(), L).matrix, L,
                                                  sc.system, avg.count());
    BoundColumns b;
    for (const auto& e : rep.per_target) {
      b.range_m += e.range_m * e.range_m;
      b.velocity_mps += e.velocity_mps * e.velocity_mps;
      b.angle_rad += e.angle_rad * e.angle_rad;
    }
    const double n = static_cast<double>(rep.per_target.size());
    b.range_m = std::sqrt(b.range_m / n);
    b.velocity_mps = std::sqrt(b.velocity_mps / n);
    b.angle_rad = std::sqrt(b.angle_rad / n);
    return b;
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::kNumeric) return std::nullopt;
    throw;
  }
}

std::vector<SweepRow> aggregate(const ScenarioConfig& sc, std::span<const TrialRecord> records,
                                const std::vector<double>& wall_times) {
  const std::vector<double> axis = sc.axis_values();
  std::vector<SweepRow> rows;
  for (std::size_t a = 0; a < axis.size(); ++a) {
    std::vector<TrialRecord> cell;
    for (const auto& r : records) {
      if (r.axis_index == a) cell.push_back(r);
    }
    const ScenarioConfig at = sc.at(axis[a]);
    std::optional<BoundColumns> bound;
    if (sc.bounds && !sc.clutter.enabled) bound = scene_bound(at, cell);
    for (std::size_t m = 0; m < sc.methods.size(); ++m) {
      SweepRow row;
      row.axis_value = axis[a];
      row.method = sc.methods[m];
      ErrorAccumulator acc;
      std::size_t correct = 0;
      for (const auto& r : cell) {
        const TrialScore& s = r.outcomes[m].score;
        acc.add(s);
        if (s.correct_detection) ++correct;
      }
      row.trials = cell.size();
      row.p_cd = cell.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(cell.size());
      row.rmse_range_m = acc.rmse_range_m();
      row.rmse_velocity_mps = acc.rmse_velocity_mps();
      row.rmse_angle_deg = acc.rmse_angle_rad() / kDeg;
      if (bound) {
        row.bcrb_range_m = bound->range_m;
        row.bcrb_velocity_mps = bound->velocity_mps;
        row.bcrb_angle_deg = bound->angle_rad / kDeg;
      }
      const std::size_t w = a * sc.methods.size() + m;
      if (w < wall_times.size()) row.wall_time_s = wall_times[w];
      rows.push_back(row);
    }
  }
  return rows;
}

SweepResult run_sweep(const ScenarioConfig& sc, const SweepOptions& opts) {
  sc.validate();
  const std::size_t n_axis = sc.axis_values().size();
  const std::size_t total = n_axis * sc.trials;
  std::vector<TrialRecord> records(total);
  std::vector<std::exception_ptr> failures(total);
  std::atomic<std::size_t> next{0};
  std::mutex report;

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        records[i] = run_trial(sc, i / sc.trials, i % sc.trials);
        if (opts.on_trial) {
          const std::lock_guard<std::mutex> lock(report);
          opts.on_trial(records[i]);
        }
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(opts.threads, 1, std::max<std::size_t>(total, 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  // Report the first failure in task order, independent of scheduling.
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::vector<double> wall;
  if (opts.record_time) {
    wall.assign(n_axis * sc.methods.size(), 0.0);
    for (const auto& r : records) {
      for (std::size_t m = 0; m < r.outcomes.size(); ++m) {
        wall[r.axis_index * sc.methods.size() + m] += r.outcomes[m].seconds;
      }
    }
  }
  SweepResult res;
  res.axis = sc.axis;
  res.rows = aggregate(sc, records, wall);
  res.records = std::move(records);
  return res;
}

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

}  // namespace

std::vector<BoundRow> bound_curve(const ScenarioConfig& sc, std::size_t draws) {
  sc.validate();
  if (draws == 0) throw_config("bound draws must be at least 1");
  if (sc.clutter.enabled) throw_config("bounds are computed for clutter-free scenes only");
  const std::vector<double> axis = sc.axis_values();
  std::vector<BoundRow> rows;
  for (std::size_t a = 0; a < axis.size(); ++a) {
    const ScenarioConfig at = sc.at(axis[a]);
    std::vector<TrialRecord> recs(draws);
    for (std::size_t t = 0; t < draws; ++t) {
      const TrialData d = simulate_trial(at, derive_seed(sc.seed, a, t));
      recs[t].fim = classical_fim(d.truth, d.block.tx, 1.0 / d.noise_var, at.system).matrix;
    }
    rows.push_back(BoundRow{axis[a], scene_bound(at, recs), draws});
  }
  return rows;
}

std::string format_bound_csv(std::span<const BoundRow> rows) {
  std::string out = "axis_value,bcrb_range_m,bcrb_velocity_mps,bcrb_angle_deg,draws\n";
  for (const auto& r : rows) {
    std::optional<double> br, bv, ba;
    if (r.bound) {
      br = r.bound->range_m;
      bv = r.bound->velocity_mps;
      ba = r.bound->angle_rad / kDeg;
    }
    out += number(r.axis_value) + ',' + optional_number(br) + ',' + optional_number(bv) + ',' +
           optional_number(ba) + ',' + std::to_string(r.draws) + '\n';
  }
  return out;
}

std::string csv_header() {
  return "axis_value,method,p_cd,rmse_range_m,rmse_velocity_mps,rmse_angle_deg,bcrb_range_m,"
         "bcrb_velocity_mps,bcrb_angle_deg,trials,wall_time_s\n";
}

std::string format_csv(const SweepResult& res) {
  std::string out = csv_header();
  for (const auto& r : res.rows) {
    out += number(r.axis_value) + ',' + std::string(method_name(r.method)) + ',' + number(r.p_cd) +
           ',' + number(r.rmse_range_m) + ',' + number(r.rmse_velocity_mps) + ',' +
           number(r.rmse_angle_deg) + ',' + optional_number(r.bcrb_range_m) + ',' +
           optional_number(r.bcrb_velocity_mps) + ',' + optional_number(r.bcrb_angle_deg) + ',' +
           std::to_string(r.trials) + ',' + optional_number(r.wall_time_s) + '\n';
  }
  return out;
}

void write_csv(const SweepResult& res, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_io("cannot open '" + path + "' for writing");
  out << format_csv(res);
  out.flush();
  if (!out) throw_io("failed writing '" + path + "'");
}

}  // namespace isac
