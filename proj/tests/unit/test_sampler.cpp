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

#include <cmath>
#include <set>

#include "doctest.h"
#include "isac/errors.hpp"
#include "isac/sampler.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

// Table I geometry, one target, prior box of the default scene.
struct PaperCase {
  SystemConfig cfg;
  PriorConfig pc;
  CTensor3 x;
  std::vector<cplx> y;
  Target truth;
};

PaperCase paper_case(double noise_var, std::uint64_t seed, std::size_t q = 1) {
  PaperCase c;
  const double lam = c.cfg.wavelength_m();
  const double deg = std::numbers::pi / 180.0;
  c.pc = PriorConfig::from_bounds(q, {delay_from_range(50.0), delay_from_range(600.0)},
                                  {doppler_from_velocity(-30.0, lam), doppler_from_velocity(30.0, lam)},
                                  {-80.0 * deg, 80.0 * deg});
  Rng rng(seed);
  c.x = generate_symbols(c.cfg, rng);
  c.truth = Target::from_kinematics(231.7, -12.3, 0.37, std::polar(1.0, 0.8), c.cfg);
  const ObservationBlock blk = synthesize(Scene{{c.truth}, {}, noise_var}, c.x, c.cfg, rng);
  c.y.assign(blk.y().begin(), blk.y().end());
  return c;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("learning rate schedule") {
  CHECK(learning_rate(0, 0.15) == 0.15);
  CHECK(learning_rate(1, 0.15) == doctest::Approx(0.075));
  CHECK(learning_rate(10000, 0.15) == doctest::Approx(0.15 / (1.0 + std::pow(10.0, 0.02))));
  CHECK(learning_rate(10000, 0.15) == doctest::Approx(0.0732734).epsilon(1e-5));
}

TEST_CASE("adam moments") {
  SamplerConfig sc;
  SUBCASE("no memory") {
    sc.beta1 = sc.beta2 = 0.0;
    AdamState a(3);
    const std::vector<double> g{2.0, -0.5, 1e-3};
    const AdamStep s = adam_update(a, g, sc, 0.1);
    CHECK(a.t == 1u);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(s.drift[i] == doctest::Approx(g[i] / (std::abs(g[i]) + sc.eps_stab)));
      CHECK(s.noise_var[i] == doctest::Approx(0.2 / (std::abs(g[i]) + sc.eps_stab)));
    }
  }
  SUBCASE("zero gradient from rest") {
    AdamState a(2);
    const AdamStep s = adam_update(a, std::vector<double>{0.0, 0.0}, sc, 0.05);
    CHECK(s.drift[0] == 0.0);
    CHECK(s.noise_var[1] == doctest::Approx(2.0 * 0.05 / sc.eps_stab));
  }
  SUBCASE("three unit gradients") {
    // Hand-unrolled: w_3 = 1 - 0.9^3 and v_3 = 1 - 0.9999^3, so both corrected moments are 1.
    AdamState a(1);
    AdamStep s;
    for (int i = 0; i < 3; ++i) s = adam_update(a, std::vector<double>{1.0}, sc, 0.1);
    CHECK(a.w[0] == doctest::Approx(1.0 - std::pow(0.9, 3)));
    CHECK(a.v[0] == doctest::Approx(1.0 - std::pow(0.9999, 3)));
    CHECK(s.drift[0] == doctest::Approx(1.0 / (1.0 + sc.eps_stab)).epsilon(1e-12));
  }
}

TEST_CASE("proposal") {
  const std::vector<double> eta{0.3, -1.0, 5.0};
  SUBCASE("fixed point") {
    const AdamStep s{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
    CHECK(propose(eta, s, 0.1, nullptr) == eta);
  }
  SUBCASE("deterministic part") {
    const AdamStep s{{1.0, 1.0, 1.0}, {9.0, 9.0, 9.0}};
    const auto p = propose(eta, s, 0.1, nullptr);
    for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == eta[i] + 0.1);
  }
  SUBCASE("Langevin form with a plain gradient") {
    // eta' = eta + (eps / 2) grad + N(0, eps) written as drift grad / 2 and variance eps.
    const std::vector<double> grad{1.5, -2.0, 0.25};
    const double eps = 0.01;
    AdamStep s;
    for (double g : grad) {
      s.drift.push_back(0.5 * g);
      s.noise_var.push_back(eps);
    }
    Rng r1(99), r2(99);
    const auto p = propose(eta, s, eps, &r1);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < 3; ++i) {
      const double want = eta[i] + 0.5 * eps * grad[i] + std::sqrt(eps) * normal(r2);
      CHECK(p[i] == doctest::Approx(want).epsilon(1e-15));
    }
  }
  SUBCASE("noise variance") {
    const AdamStep s{{0.0, 0.0, 0.0}, {0.04, 1.0, 2.5}};
    Rng rng(7);
    std::vector<double> sum(3, 0.0), sum2(3, 0.0);
    const int n = 100000;
    for (int r = 0; r < n; ++r) {
      const auto p = propose(eta, s, 0.1, &rng);
      for (std::size_t i = 0; i < 3; ++i) {
        sum[i] += p[i] - eta[i];
        sum2[i] += (p[i] - eta[i]) * (p[i] - eta[i]);
      }
    }
    for (std::size_t i = 0; i < 3; ++i) {
      const double mean = sum[i] / n;
      const double var = sum2[i] / n - mean * mean;
      CHECK(var == doctest::Approx(s.noise_var[i]).epsilon(0.05));
    }
  }
}

TEST_CASE("metropolis test") {
  Rng rng(5);
  int acc_equal = 0, acc_half = 0, acc_inf = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    acc_equal += mh_accept(-3.0, -3.0, rng);
    acc_half += mh_accept(-3.0 - std::log(2.0), -3.0, rng);
    acc_inf += mh_accept(kOutsideSupport, -3.0, rng);
  }
  CHECK(acc_equal == n);
  CHECK(std::abs(static_cast<double>(acc_half) / n - 0.5) < 0.01);
  CHECK(acc_inf == 0);
  CHECK(mh_accept(1e300, -1e300, rng));
  CHECK_FALSE(mh_accept(-1e300, 1e300, rng));
}

TEST_CASE("mini-batch draws") {
  BatchSampler bs(50, 8);
  Rng rng(3);
  std::vector<int> hits(50, 0);
  for (int r = 0; r < 5000; ++r) {
    const auto b = bs.draw(rng);
    REQUIRE(b.size() == 8u);
    const std::set<std::size_t> uniq(b.begin(), b.end());
    CHECK(uniq.size() == 8u);
    for (std::size_t i : b) {
      REQUIRE(i < 50u);
      ++hits[i];
    }
  }
  // Each position expected 800 times; binomial sd about 27.
  for (int h : hits) CHECK(std::abs(h - 800) < 150);
  CHECK_THROWS_AS(BatchSampler(4, 5), Error);
}

TEST_CASE("coordinate maps") {
  using Axis = CoordinateMap::Axis;
  using Kind = CoordinateMap::Kind;
  const CoordinateMap map({Axis{Kind::kLinear, 0.3, 0.0, 1.0}, Axis{Kind::kLog, 0.5, 0.0, 1.0},
                           Axis{Kind::kLogit, 2.0, -1.0, 3.0}});
  const std::vector<double> u{0.7, -0.4, 0.25};
  const auto eta = map.to_natural(u);
  CHECK(eta[0] == doctest::Approx(0.21));
  CHECK(eta[1] == doctest::Approx(std::exp(-0.2)));
  CHECK(eta[2] == doctest::Approx(-1.0 + 3.0 / (1.0 + std::exp(-0.5))));
  const auto back = map.to_unit(eta);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));

  // log |d eta / d u| against a numerical Jacobian.
  double lj = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    auto fi = [&](const std::vector<double>& v) { return map.to_natural(v)[i]; };
    lj += std::log(std::abs(oracle::central_difference(fi, u, i, 1e-6)));
  }
  CHECK(map.log_jacobian(u) == doctest::Approx(lj).epsilon(1e-8));

  // Pull-back of f(eta) = sum c_i eta_i^2 plus the Jacobian term.
  const std::vector<double> c{1.0, -2.0, 0.5};
  auto f = [&](const std::vector<double>& v) {
    const auto e = map.to_natural(v);
    double s = map.log_jacobian(v);
    for (std::size_t i = 0; i < 3; ++i) s += c[i] * e[i] * e[i];
    return s;
  };
  std::vector<double> ge(3);
  for (std::size_t i = 0; i < 3; ++i) ge[i] = 2.0 * c[i] * eta[i];
  const auto gu = map.pull_back(u, ge);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(gu[i] == doctest::Approx(oracle::central_difference(f, u, i, 1e-6)).epsilon(1e-7));
  }
}

TEST_CASE("phase centring") {
  const SystemConfig cfg = oracle::small_system(4, 16, 4);
  const PhaseCentering pcen(cfg);
  CHECK_FALSE(pcen.identity());
  CHECK(PhaseCentering().identity());

  // Reference phase at the centre of the index ranges; the angle term
  // counts transmit and receive steering.
  const double tau = 3e-7, fd = 1500.0, th = 0.4;
  const double want = -2.0 * std::numbers::pi * 7.5 * cfg.subcarrier_hz * tau +
                      2.0 * std::numbers::pi * 1.5 * cfg.symbol_period_s() * fd +
                      std::numbers::pi * 3.0 * std::sin(th);
  CHECK(pcen.phase(tau, fd, th) == doctest::Approx(want).epsilon(1e-12));

  const PriorConfig pc = oracle::small_prior(2, cfg);
  std::mt19937 gen(4);
  const ParamState eta = oracle::random_state(2, pc, gen);
  const auto v = eta.flatten();
  const auto c = pcen.to_centred(v);
  const auto back = pcen.to_model(c);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
  // |b| is unchanged.
  for (std::size_t q = 0; q < 2; ++q) {
    const double m0 = std::hypot(v[ParamState::bre_offset(2) + q], v[ParamState::bim_offset(2) + q]);
    const double m1 = std::hypot(c[ParamState::bre_offset(2) + q], c[ParamState::bim_offset(2) + q]);
    CHECK(m1 == doctest::Approx(m0));
  }

  // Chain rule against differences of f(to_model(c)) for a smooth f.
  const std::vector<double> w = [&] {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::sin(1.0 + static_cast<double>(i));
    return r;
  }();
  const auto s = [&] {
    std::vector<double> r(v.size(), 1.0);
    for (std::size_t i = 0; i < 2; ++i) {
      r[ParamState::delay_offset(2) + i] = pc.delay.support.width();
      r[ParamState::doppler_offset(2) + i] = pc.doppler.support.width();
    }
    return r;
  }();
  auto f = [&](const std::vector<double>& cc) {
    const auto m = pcen.to_model(cc);
    double acc = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) acc += w[i] * std::pow(m[i] / s[i], 2);
    return acc;
  };
  std::vector<double> gm(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) gm[i] = 2.0 * w[i] * v[i] / (s[i] * s[i]);
  const auto gc = pcen.pull_back(v, gm);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double h = 1e-6 * s[i];
    const double fd_i = oracle::central_difference(f, c, i, h);
    CHECK(gc[i] * s[i] == doctest::Approx(fd_i * s[i]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("configuration checks") {
  SamplerConfig sc;
  CHECK_NOTHROW(sc.validate(14336));
  CHECK(sc.iterations() == 45000u);
  sc.batch_size = 20000;
  CHECK_THROWS_AS(sc.validate(14336), Error);
  sc = SamplerConfig{};
  sc.beta1 = 1.0;
  CHECK_THROWS_AS(sc.validate(14336), Error);
  CHECK(parse_scaling(scaling_name(Scaling::kInterval)) == Scaling::kInterval);
  CHECK(parse_init_mode(init_mode_name(InitMode::kPrior)) == InitMode::kPrior);
  CHECK_THROWS_AS(parse_scaling("fancy"), Error);
}

TEST_CASE("frozen chain returns its start") {
  const PaperCase c = paper_case(0.01, 1);
  SamplerConfig sc;
  sc.n_burn = 0;
  sc.n_samples = 1;
  ChainControls ctl;
  ParamState init(1);
  init.delay[0] = c.truth.delay_s;
  init.doppler[0] = c.truth.doppler_hz;
  init.angle[0] = c.truth.angle_rad;
  init.b_re[0] = 0.9;
  init.b_im[0] = 0.1;
  init.rho[0] = 1.0;
  init.xi = 50.0;
  ctl.initial = init;
  ctl.policy = AcceptPolicy::kRejectAll;
  for (Scaling s : {Scaling::kInterval, Scaling::kCurvature}) {
    sc.scaling = s;
    const ChainResult r = run_chain(c.y, c.x, c.cfg, c.pc, sc, ctl);
    CHECK(r.estimate.flatten() == init.flatten());
    CHECK(r.diagnostics.accepted == 0u);
  }
}

TEST_CASE("rejections keep the state bitwise") {
  const PaperCase c = paper_case(0.01, 2);
  SamplerConfig sc;
  sc.n_burn = 10;
  sc.n_samples = 20;
  sc.seed = 4;
  ChainControls ctl;
  ctl.policy = AcceptPolicy::kRejectAll;
  ctl.record_samples = true;
  const ChainResult r = run_chain(c.y, c.x, c.cfg, c.pc, sc, ctl);
  REQUIRE(r.samples.size() == 20u);
  for (const auto& s : r.samples) CHECK(s.flatten() == r.samples.front().flatten());
}

TEST_CASE("posterior mean of the collected states") {
  const PaperCase c = paper_case(0.01, 3, 2);
  SamplerConfig sc;
  sc.n_burn = 500;
  sc.n_samples = 300;
  sc.seed = 8;
  ChainControls ctl;
  ctl.record_samples = true;
  for (Scaling s : {Scaling::kInterval, Scaling::kCurvature}) {
    sc.scaling = s;
    const ChainResult r = run_chain(c.y, c.x, c.cfg, c.pc, sc, ctl);
    REQUIRE(r.samples.size() == 300u);
    std::vector<double> mean(r.estimate.dim(), 0.0);
    for (const auto& st : r.samples) {
      CHECK(strictly_inside(st, c.pc));
      const auto v = st.flatten();
      for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
    }
    const auto est = r.estimate.flatten();
    for (std::size_t i = 0; i < est.size(); ++i) {
      CHECK(est[i] == doctest::Approx(mean[i] / 300.0).epsilon(1e-12));
    }
    const auto& d = r.diagnostics;
    CHECK(d.iterations == 800u);
    CHECK(d.trace.size() == 800u);
    CHECK(d.acceptance_rate == doctest::Approx(static_cast<double>(d.accepted) / 800.0));
    CHECK(d.acceptance_rate >= 0.0);
    CHECK(d.acceptance_rate <= 1.0);
  }
}

TEST_CASE("near-noiseless single target started at the truth") {
  const PaperCase c = paper_case(1e-6, 5);
  SamplerConfig sc;
  sc.n_burn = 3000;
  sc.n_samples = 1000;
  sc.seed = 2;
  ChainControls ctl;
  ParamState init(1);
  init.delay[0] = c.truth.delay_s;
  init.doppler[0] = c.truth.doppler_hz;
  init.angle[0] = c.truth.angle_rad;
  init.b_re[0] = c.truth.refl.real();
  init.b_im[0] = c.truth.refl.imag();
  init.rho[0] = 1.0;
  init.xi = 1e6;
  ctl.initial = init;
  for (Scaling s : {Scaling::kInterval, Scaling::kCurvature}) {
    sc.scaling = s;
    const ChainResult r = run_chain(c.y, c.x, c.cfg, c.pc, sc, ctl);
    CHECK(within_support(r.estimate, c.pc));
    CHECK(std::abs(range_from_delay(r.estimate.delay[0]) - c.truth.range_m()) < 0.01);
  }
}

TEST_CASE("full configuration run is reproducible") {
  const PaperCase c = paper_case(0.01, 6, 10);
  SamplerConfig sc;
  sc.seed = 77;
  const ChainResult a = run_chain(c.y, c.x, c.cfg, c.pc, sc);
  const ChainResult b = run_chain(c.y, c.x, c.cfg, c.pc, sc);
  CHECK(a.estimate.flatten() == b.estimate.flatten());
  CHECK(a.diagnostics.accepted == b.diagnostics.accepted);
  CHECK(a.diagnostics.acceptance_rate > 0.05);
  CHECK(a.diagnostics.acceptance_rate < 0.95);
}

}  // TEST_SUITE
