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

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "doctest.h"
#include "isac/detector.hpp"
#include "isac/errors.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

struct BestAssignment {
  std::size_t matches = 0;
  double cost = 0.0;
};

// Every injective map of truths into estimates (or to nothing); keeps the
// largest gate-feasible match count, then the smallest summed cost.
BestAssignment exhaustive(const std::vector<Target>& truth, const std::vector<Estimate>& est,
                          const Gates& g, const SystemConfig& cfg) {
  const double lam = cfg.wavelength_m();
  BestAssignment best;
  bool first = true;
  std::vector<int> pick(truth.size(), -1);
  std::function<void(std::size_t, std::vector<bool>&)> rec = [&](std::size_t t, std::vector<bool>& used) {
    if (t == truth.size()) {
      std::size_t n = 0;
      double cost = 0.0;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        if (pick[i] < 0) continue;
        const Estimate& e = est[static_cast<std::size_t>(pick[i])];
        const double dr = (e.range_m - truth[i].range_m()) / g.range_m;
        const double dv = (e.velocity_mps - truth[i].velocity_mps(lam)) / g.velocity_mps;
        const double da = (e.angle_rad - truth[i].angle_rad) / g.angle_rad;
        ++n;
        cost += dr * dr + dv * dv + da * da;
      }
      if (first || n > best.matches || (n == best.matches && cost < best.cost)) {
        best = {n, cost};
        first = false;
      }
      return;
    }
    pick[t] = -1;
    rec(t + 1, used);
    for (std::size_t j = 0; j < est.size(); ++j) {
      if (used[j]) continue;
      const double lr = std::abs(est[j].range_m - truth[t].range_m());
      const double lv = std::abs(est[j].velocity_mps - truth[t].velocity_mps(lam));
      const double la = std::abs(est[j].angle_rad - truth[t].angle_rad);
      if (lr > g.range_m || lv > g.velocity_mps || la > g.angle_rad) continue;
      used[j] = true;
      pick[t] = static_cast<int>(j);
      rec(t + 1, used);
      used[j] = false;
      pick[t] = -1;
    }
  };
  std::vector<bool> used(est.size(), false);
  rec(0, used);
  return best;
}

Estimate estimate_of(const Target& t, const SystemConfig& cfg, double dr = 0.0, double dv = 0.0,
                     double da = 0.0) {
  return Estimate{t.range_m() + dr, t.velocity_mps(cfg.wavelength_m()) + dv, t.angle_rad + da, t.refl};
}

}  // namespace

TEST_SUITE("detector") {

TEST_CASE("cumulative energy selection") {
  SUBCASE("one dominant slot") {
    const std::vector<cplx> b{1.0, 0.0, 0.0};
    const SlotSelection s = detect(b, 0.9);
    CHECK(s.count == 1u);
    CHECK(s.slots == std::vector<std::size_t>{0});
  }
  SUBCASE("two equal slots") {
    const std::vector<cplx> b{1.0, 1.0, 0.0, 0.0};
    CHECK(detect(b, 0.9).count == 2u);
  }
  SUBCASE("cumulative sum") {
    const std::vector<cplx> b{std::sqrt(0.15), std::sqrt(0.5), cplx{0.0, std::sqrt(0.05)}, std::sqrt(0.3)};
    const SlotSelection s = detect(b, 0.9);
    CHECK(s.count == 3u);
    CHECK(s.slots == std::vector<std::size_t>{1, 3, 0});
  }
  SUBCASE("all zero") {
    const std::vector<cplx> b(4, 0.0);
    const SlotSelection s = detect(b, 0.9);
    CHECK(s.count == 0u);
    CHECK(s.slots.empty());
  }
  SUBCASE("threshold range") {
    const std::vector<cplx> b{1.0};
    CHECK_THROWS_AS(detect(b, 0.0), Error);
    CHECK_THROWS_AS(detect(b, 1.5), Error);
    CHECK(detect(b, 1.0).count == 1u);
  }
}

TEST_CASE("selection properties") {
  std::mt19937 gen(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<cplx> b(10);
    for (auto& v : b) v = {g(gen), g(gen)};
    const cplx c{-2.5, 0.7};
    std::vector<cplx> cb(b);
    for (auto& v : cb) v *= c;
    CHECK(detect(b, 0.9).slots == detect(cb, 0.9).slots);
    std::size_t last = 0;
    for (double thr : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0}) {
      const std::size_t n = detect(b, thr).count;
      CHECK(n >= last);
      last = n;
    }
    // Minimality against a direct cumulative sum of sorted energies.
    std::vector<double> e;
    double tot = 0.0;
    for (const auto& v : b) {
      e.push_back(std::norm(v));
      tot += std::norm(v);
    }
    std::sort(e.rbegin(), e.rend());
    std::size_t h = 0;
    double acc = 0.0;
    while (acc < 0.9 * tot) acc += e[h++];
    CHECK(detect(b, 0.9).count == h);
  }
}

TEST_CASE("parameter readout") {
  const SystemConfig cfg;
  ParamState eta(2);
  eta.delay = {1e-6, 2e-6};
  eta.doppler = {2000.0, -500.0};
  eta.angle = {0.1, -0.2};
  eta.b_re = {0.5, 1.0};
  eta.b_im = {0.0, 0.0};
  const std::vector<std::size_t> slots{1, 0};
  const auto e = extract(eta, slots, cfg);
  REQUIRE(e.size() == 2u);
  CHECK(e[1].range_m == doctest::Approx(149.896229));
  CHECK(e[1].velocity_mps == doctest::Approx(2000.0 * cfg.wavelength_m() / 2.0));
  CHECK(e[0].angle_rad == -0.2);

  const Target t = Target::from_kinematics(321.0, -17.0, 0.3, {1.0, 0.0}, cfg);
  ParamState one(1);
  one.delay[0] = t.delay_s;
  one.doppler[0] = t.doppler_hz;
  one.angle[0] = t.angle_rad;
  const auto r = extract(one, std::vector<std::size_t>{0}, cfg);
  CHECK(r[0].range_m == t.range_m());
  CHECK(r[0].velocity_mps == t.velocity_mps(cfg.wavelength_m()));

  one.b_re[0] = 2.0;
  const DetectionResult d = detect_targets(one, 0.9, cfg);
  CHECK(d.count() == 1u);
  CHECK(d.active_slots == std::vector<std::size_t>{0});
}

TEST_CASE("gates") {
  SystemConfig cfg;
  const Gates g = Gates::half_cell(cfg);
  const double cell_r = kSpeedOfLight / (2.0 * 128.0 * 120e3);
  CHECK(g.range_m == doctest::Approx(0.5 * cell_r));
  Gates bad;
  bad.range_m = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("trial scoring") {
  const SystemConfig cfg;
  const Gates gates{2.5, 10.0, 0.05};
  const Target a = Target::from_kinematics(100.0, 10.0, 0.2, {1.0, 0.0}, cfg);
  const Target b = Target::from_kinematics(105.0, 10.0, 0.2, {1.0, 0.0}, cfg);

  SUBCASE("miss") {
    const TrialScore s = score_trial(std::vector<Target>{a}, DetectionResult{}, gates, cfg);
    CHECK_FALSE(s.correct_detection);
    CHECK(s.unmatched_truths == 1u);
  }
  SUBCASE("perfect") {
    DetectionResult d;
    d.estimates = {estimate_of(b, cfg), estimate_of(a, cfg)};
    d.active_slots = {0, 1};
    const TrialScore s = score_trial(std::vector<Target>{a, b}, d, gates, cfg);
    CHECK(s.correct_detection);
    REQUIRE(s.pairs.size() == 2u);
    for (const auto& p : s.pairs) {
      CHECK(p.range_err_m == doctest::Approx(0.0).scale(1.0));
      CHECK(p.velocity_err_mps == doctest::Approx(0.0).scale(1.0));
    }
  }
  SUBCASE("extra estimate fails the count") {
    DetectionResult d;
    d.estimates = {estimate_of(a, cfg), estimate_of(a, cfg, 50.0)};
    const TrialScore s = score_trial(std::vector<Target>{a}, d, gates, cfg);
    CHECK_FALSE(s.correct_detection);
    CHECK(s.pairs.size() == 1u);
    CHECK(s.unmatched_estimates == 1u);
  }
  SUBCASE("crossed estimates take the cheaper assignment") {
    // Estimate 0 sits 3 m from a but 2 m from b; estimate 1 the mirror image.
    const Gates wide{3.5, 10.0, 0.05};
    DetectionResult d;
    d.estimates = {estimate_of(a, cfg, 3.0), estimate_of(b, cfg, -3.0)};
    const std::vector<Target> truth{a, b};
    const TrialScore s = score_trial(truth, d, wide, cfg);
    const double identity = 2.0 * std::pow(3.0 / 3.5, 2);
    CHECK(s.total_cost < identity);
    CHECK(s.pairs.size() == 2u);
    for (const auto& p : s.pairs) CHECK(p.truth != p.estimate);
    const BestAssignment o = exhaustive(truth, d.estimates, wide, cfg);
    CHECK(s.total_cost == doctest::Approx(o.cost));
  }
}

TEST_CASE("scoring matches exhaustive assignment and is order independent") {
  const SystemConfig cfg;
  const Gates gates{3.0, 8.0, 0.08};
  std::mt19937 gen(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t nt = 1 + rep % 4, ne = rep % 5;
    std::vector<Target> truth;
    for (std::size_t i = 0; i < nt; ++i) {
      truth.push_back(Target::from_kinematics(200.0 + 4.0 * u(gen), 5.0 * u(gen), 0.05 * u(gen), {1.0, 0.0}, cfg));
    }
    DetectionResult d;
    for (std::size_t j = 0; j < ne; ++j) {
      const Target& t = truth[j % nt];
      d.estimates.push_back(estimate_of(t, cfg, 3.0 * u(gen), 6.0 * u(gen), 0.06 * u(gen)));
      d.active_slots.push_back(j);
    }
    const TrialScore s = score_trial(truth, d, gates, cfg);
    const BestAssignment o = exhaustive(truth, d.estimates, gates, cfg);
    CHECK(s.pairs.size() == o.matches);
    CHECK(s.total_cost == doctest::Approx(o.cost).epsilon(1e-9));
    CHECK(s.correct_detection == (ne == nt && o.matches == nt));

    std::vector<Target> rt(truth.rbegin(), truth.rend());
    DetectionResult rd = d;
    std::reverse(rd.estimates.begin(), rd.estimates.end());
    const TrialScore s2 = score_trial(rt, rd, gates, cfg);
    CHECK(s2.pairs.size() == s.pairs.size());
    CHECK(s2.total_cost == doctest::Approx(s.total_cost).epsilon(1e-9));
  }
}

TEST_CASE("error accumulation") {
  ErrorAccumulator acc;
  const std::vector<MatchedPair> pairs{{0, 0, 1.0, 2.0, 0.1}, {1, 1, -3.0, 0.0, 0.2}, {0, 0, 0.5, -1.0, 0.0}};
  double r2 = 0.0, v2 = 0.0, a2 = 0.0;
  for (const auto& p : pairs) {
    acc.add_pair(p);
    r2 += p.range_err_m * p.range_err_m;
    v2 += p.velocity_err_mps * p.velocity_err_mps;
    a2 += p.angle_err_rad * p.angle_err_rad;
  }
  CHECK(acc.count() == 3u);
  CHECK(acc.rmse_range_m() == doctest::Approx(std::sqrt(r2 / 3.0)));
  CHECK(acc.rmse_velocity_mps() == doctest::Approx(std::sqrt(v2 / 3.0)));
  CHECK(acc.rmse_angle_rad() == doctest::Approx(std::sqrt(a2 / 3.0)));

  ErrorAccumulator a1, b1;
  a1.add_pair(pairs[0]);
  b1.add_pair(pairs[1]);
  b1.add_pair(pairs[2]);
  a1.merge(b1);
  CHECK(a1.rmse_range_m() == doctest::Approx(acc.rmse_range_m()));
  CHECK(std::isnan(ErrorAccumulator().rmse_range_m()));
}

}  // TEST_SUITE
