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

#include "isac/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isac/baselines.hpp"
#include "isac/errors.hpp"

namespace isac {

SlotSelection detect(std::span<const cplx> coeffs, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw_input("detect: energy threshold must lie in (0, 1]");
  }
  SlotSelection sel;
  std::vector<std::size_t> order(coeffs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::norm(coeffs[a]) > std::norm(coeffs[b]);
  });
  double total = 0.0;
  for (const auto& c : coeffs) total += std::norm(c);
  if (!(total > 0.0)) return sel;
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += std::norm(coeffs[i]);
    sel.slots.push_back(i);
    // Small slack so exact ties such as 0.9 of 1.0 count as reached.
    if (acc >= threshold * total * (1.0 - 1e-12)) break;
  }
  sel.count = sel.slots.size();
  return sel;
}

std::vector<Estimate> extract(const ParamState& eta, std::span<const std::size_t> slots,
                              const SystemConfig& cfg) {
  std::vector<Estimate> out;
  out.reserve(slots.size());
  for (std::size_t q : slots) {
    if (q >= eta.q()) throw_input("extract: slot index out of range");
    Estimate e;
    e.range_m = range_from_delay(eta.delay[q]);
    e.velocity_mps = velocity_from_doppler(eta.doppler[q], cfg.wavelength_m());
    e.angle_rad = eta.angle[q];
    e.refl = eta.b(q);
    out.push_back(e);
  }
  return out;
}

DetectionResult detect_targets(const ParamState& eta, double threshold, const SystemConfig& cfg) {
  const auto coeffs = eta.coefficients();
  const SlotSelection sel = detect(coeffs, threshold);
  DetectionResult det;
  det.active_slots = sel.slots;
  det.estimates = extract(eta, sel.slots, cfg);
  return det;
}

Gates Gates::half_cell(const SystemConfig& cfg) {
  const RayleighCells cells = rayleigh_cells(cfg);
  return Gates{0.5 * cells.range_m, 0.5 * cells.velocity_mps, 0.5 * cells.angle_rad};
}

void Gates::validate() const {
  if (!(range_m > 0.0 && velocity_mps > 0.0 && angle_rad > 0.0)) {
    throw_config("gates must be positive in every dimension");
  }
}

namespace {

struct PairCost {
  bool feasible = false;
  double cost = 0.0;
  MatchedPair pair;
};

struct Assignment {
  std::size_t matches = 0;
  double cost = 0.0;
  std::vector<int> estimate_of;  // per truth, -1 if unmatched
};

bool better(std::size_t matches, double cost, const Assignment& best) {
  if (matches != best.matches) return matches > best.matches;
  return cost < best.cost;
}

void enumerate(std::size_t i, const std::vector<std::vector<PairCost>>& table,
               std::vector<bool>& used, std::vector<int>& current, std::size_t matches,
               double cost, Assignment& best) {
  const std::size_t T = table.size();
  if (i == T) {
    if (better(matches, cost, best)) {
      best.matches = matches;
      best.cost = cost;
      best.estimate_of = current;
    }
    return;
  }
  // Remaining truths cannot lift the match count above the incumbent.
  if (matches + (T - i) < best.matches) return;
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j] || !table[i][j].feasible) continue;
    used[j] = true;
    current[i] = static_cast<int>(j);
    enumerate(i + 1, table, used, current, matches + 1, cost + table[i][j].cost, best);
    used[j] = false;
  }
  current[i] = -1;
  enumerate(i + 1, table, used, current, matches, cost, best);
}

Assignment greedy(const std::vector<std::vector<PairCost>>& table, std::size_t n_est) {
  const std::size_t T = table.size();
  Assignment a;
  a.estimate_of.assign(T, -1);
  std::vector<bool> truth_used(T, false), est_used(n_est, false);
  while (true) {
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    bool found = false;
    for (std::size_t i = 0; i < T; ++i) {
      if (truth_used[i]) continue;
      for (std::size_t j = 0; j < n_est; ++j) {
        if (est_used[j] || !table[i][j].feasible) continue;
        if (table[i][j].cost < best_cost) {
          best_cost = table[i][j].cost;
          bi = i;
          bj = j;
          found = true;
        }
      }
    }
    if (!found) break;
    truth_used[bi] = est_used[bj] = true;
    a.estimate_of[bi] = static_cast<int>(bj);
    ++a.matches;
    a.cost += best_cost;
  }
  return a;
}

}  // namespace

TrialScore score_trial(std::span<const Target> truth, const DetectionResult& det,
                       const Gates& gates, const SystemConfig& cfg) {
  gates.validate();
  const std::size_t T = truth.size(), E = det.estimates.size();
  const double lambda = cfg.wavelength_m();
  std::vector<std::vector<PairCost>> table(T, std::vector<PairCost>(E));
  for (std::size_t i = 0; i < T; ++i) {
    const double r = truth[i].range_m();
    const double v = truth[i].velocity_mps(lambda);
    const double th = truth[i].angle_rad;
    for (std::size_t j = 0; j < E; ++j) {
      const Estimate& e = det.estimates[j];
      PairCost& pc = table[i][j];
      pc.pair = MatchedPair{i, j, e.range_m - r, e.velocity_mps - v, e.angle_rad - th};
      const double nr = pc.pair.range_err_m / gates.range_m;
      const double nv = pc.pair.velocity_err_mps / gates.velocity_mps;
      const double na = pc.pair.angle_err_rad / gates.angle_rad;
      pc.feasible = std::abs(nr) <= 1.0 && std::abs(nv) <= 1.0 && std::abs(na) <= 1.0;
      pc.cost = nr * nr + nv * nv + na * na;
    }
  }

  Assignment best;
  if (std::min(T, E) <= 6) {
    best.estimate_of.assign(T, -1);
    std::vector<bool> used(E, false);
    std::vector<int> current(T, -1);
    enumerate(0, table, used, current, 0, 0.0, best);
  } else {
    best = greedy(table, E);
  }

  TrialScore score;
  for (std::size_t i = 0; i < T; ++i) {
    if (best.estimate_of[i] < 0) continue;
    score.pairs.push_back(table[i][static_cast<std::size_t>(best.estimate_of[i])].pair);
  }
  score.total_cost = best.cost;
  score.unmatched_truths = T - score.pairs.size();
  score.unmatched_estimates = E - score.pairs.size();
  score.correct_detection = E == T && score.unmatched_truths == 0;
  return score;
}

void ErrorAccumulator::add(const TrialScore& score) {
  for (const auto& p : score.pairs) add_pair(p);
}

void ErrorAccumulator::add_pair(const MatchedPair& p) {
  ++count_;
  sq_range_ += p.range_err_m * p.range_err_m;
  sq_velocity_ += p.velocity_err_mps * p.velocity_err_mps;
  sq_angle_ += p.angle_err_rad * p.angle_err_rad;
}

void ErrorAccumulator::merge(const ErrorAccumulator& other) {
  count_ += other.count_;
  sq_range_ += other.sq_range_;
  sq_velocity_ += other.sq_velocity_;
  sq_angle_ += other.sq_angle_;
}

namespace {
double root_mean(double sum, std::size_t n) {
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(sum / static_cast<double>(n));
}
}  // namespace

double ErrorAccumulator::rmse_range_m() const { return root_mean(sq_range_, count_); }
double ErrorAccumulator::rmse_velocity_mps() const { return root_mean(sq_velocity_, count_); }
double ErrorAccumulator::rmse_angle_rad() const { return root_mean(sq_angle_, count_); }

}  // namespace isac
