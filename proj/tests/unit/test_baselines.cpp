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

#include <array>
#include <cmath>

#include "doctest.h"
#include "isac/baselines.hpp"
#include "isac/errors.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

std::vector<cplx> echo_of(const std::vector<Target>& ts, const CTensor3& x, const SystemConfig& cfg) {
  std::vector<cplx> y(cfg.data_size(), 0.0);
  for (const auto& t : ts) {
    const auto d = oracle::atom(t.delay_s, t.doppler_hz, t.angle_rad, x, cfg);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t.refl * d[i];
  }
  return y;
}

struct Fixture {
  SystemConfig cfg = oracle::small_system(4, 16, 8);
  CTensor3 x = oracle::random_symbols(cfg, 21);
  RayleighCells cells = rayleigh_cells(cfg);
  GridSpec grid;
  Fixture() {
    grid.delay_s = {0.0, 4.0 * cells.delay_s};
    grid.doppler_hz = {-2.0 * cells.doppler_hz, 2.0 * cells.doppler_hz};
    grid.angle_rad = {-0.8, 0.8};
    grid.n_delay = 9;
    grid.n_doppler = 9;
    grid.n_angle = 9;
  }
  Target at(std::size_t g, cplx b) const {
    const GridPoint p = grid.point(g);
    Target t;
    t.delay_s = p.delay_s;
    t.doppler_hz = p.doppler_hz;
    t.angle_rad = p.angle_rad;
    t.refl = b;
    return t;
  }
};

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("Rayleigh cells") {
  const RayleighCells r = rayleigh_cells(SystemConfig{});
  CHECK(r.range_m == doctest::Approx(9.75887).epsilon(1e-5));
  CHECK(r.velocity_mps == doctest::Approx(34.262).epsilon(1e-4));
  CHECK(r.angle_rad * 180.0 / oracle::kPi == doctest::Approx(14.504).epsilon(1e-4));
  CHECK(r.delay_s == doctest::Approx(1.0 / (128.0 * 120e3)));
  CHECK(r.range_m == doctest::Approx(r.delay_s * oracle::kC / 2.0));
  const RayleighCells r2 = rayleigh_cells(oracle::small_system(8, 256, 14));
  CHECK(r2.range_m == doctest::Approx(r.range_m / 2.0));
}

TEST_CASE("grid indexing") {
  GridSpec g;
  g.delay_s = {0.0, 1.0};
  g.doppler_hz = {-2.0, 2.0};
  g.angle_rad = {0.0, 0.3};
  g.n_delay = 5;
  g.n_doppler = 3;
  g.n_angle = 1;
  CHECK(g.size() == 15u);
  CHECK(g.index(4, 2, 0) == 14u);
  CHECK(g.delay_at(0) == 0.0);
  CHECK(g.delay_at(4) == doctest::Approx(1.0));
  CHECK(g.doppler_at(1) == doctest::Approx(0.0));
  CHECK(g.angle_at(0) == doctest::Approx(0.15));
  const GridPoint p = g.point(g.index(2, 0, 0));
  CHECK(p.delay_s == doctest::Approx(0.5));
  CHECK(p.doppler_hz == doctest::Approx(-2.0));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const GridPoint q = g.point(i);
    const auto id = static_cast<std::size_t>(std::lround(q.delay_s * 4.0));
    const auto ifd = static_cast<std::size_t>(std::lround((q.doppler_hz + 2.0) / 2.0));
    CHECK(g.index(id, ifd, 0) == i);
  }
  g.n_doppler = 0;
  CHECK_THROWS_AS(g.validate(), Error);
  g.n_doppler = 3;
  g.delay_s = {1.0, 0.0};
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("grid resolution per cell") {
  const SystemConfig cfg;
  const RayleighCells c = rayleigh_cells(cfg);
  for (double ppc : {1.0, 2.0, 3.5}) {
    const GridSpec g = GridSpec::per_cell(cfg, {0.0, 20.0 * c.delay_s}, {-3.0 * c.doppler_hz, 3.0 * c.doppler_hz},
                                          {-1.0, 1.0}, ppc);
    CHECK((g.delay_at(1) - g.delay_at(0)) <= c.delay_s / ppc * (1.0 + 1e-12));
    CHECK((g.doppler_at(1) - g.doppler_at(0)) <= c.doppler_hz / ppc * (1.0 + 1e-12));
    CHECK((g.angle_at(1) - g.angle_at(0)) <= c.angle_rad / ppc * (1.0 + 1e-12));
    CHECK(g.delay_at(g.n_delay - 1) == doctest::Approx(20.0 * c.delay_s));
  }
  CHECK_THROWS_AS(GridSpec::per_cell(cfg, {0.0, 1e-6}, {0.0, 1.0}, {0.0, 1.0}, 0.0), Error);
}

TEST_CASE("grid correlator matches the explicit inner product") {
  Fixture f;
  std::mt19937 gen(3);
  std::normal_distribution<double> g;
  std::vector<cplx> r(f.cfg.data_size());
  for (auto& v : r) v = {g(gen), g(gen)};
  const GridCorrelator corr(f.grid, f.x, f.cfg);
  const auto c = corr.correlate(r);
  REQUIRE(c.size() == f.grid.size());
  for (std::size_t gi = 0; gi < f.grid.size(); gi += 37) {
    const GridPoint p = f.grid.point(gi);
    const auto d = oracle::atom(p.delay_s, p.doppler_hz, p.angle_rad, f.x, f.cfg);
    cplx want = 0.0;
    double e = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      want += std::conj(d[i]) * r[i];
      e += std::norm(d[i]);
    }
    CHECK(std::abs(c[gi] - want) < 1e-9 * std::max(1.0, std::abs(want)));
    CHECK(corr.atom_energy(gi) == doctest::Approx(e).epsilon(1e-12));
  }
}

TEST_CASE("orthogonal matching pursuit") {
  Fixture f;
  SUBCASE("noiseless on-grid target is recovered exactly") {
    const std::size_t g0 = f.grid.index(3, 6, 2);
    const cplx b{0.8, -0.35};
    const auto y = echo_of({f.at(g0, b)}, f.x, f.cfg);
    const OmpResult r = omp(y, f.x, f.cfg, f.grid, OmpStop{1, 0.0});
    REQUIRE(r.selected.size() == 1u);
    CHECK(r.selected[0] == g0);
    CHECK(std::abs(r.coefficients[0] - b) < 1e-8);
    CHECK(r.residual_norms.back() < 1e-8 * r.residual_norms.front());
    REQUIRE(r.detection.count() == 1u);
    CHECK(r.detection.estimates[0].range_m == doctest::Approx(range_from_delay(f.grid.point(g0).delay_s)));
  }
  SUBCASE("two on-grid targets") {
    const std::size_t g0 = f.grid.index(2, 1, 7), g1 = f.grid.index(6, 4, 1);
    const auto y = echo_of({f.at(g0, {1.0, 0.0}), f.at(g1, {0.0, -0.6})}, f.x, f.cfg);
    const OmpResult r = omp(y, f.x, f.cfg, f.grid, OmpStop{2, 0.0});
    REQUIRE(r.selected.size() == 2u);
    CHECK(r.selected[0] == g0);
    CHECK(r.selected[1] == g1);
    CHECK(std::abs(r.coefficients[1] - cplx{0.0, -0.6}) < 1e-8);
    // descending |b|
    CHECK(std::abs(r.detection.estimates[0].refl) >= std::abs(r.detection.estimates[1].refl));
  }
  SUBCASE("off-grid target lands on a neighbour") {
    const double step = f.grid.delay_at(1) - f.grid.delay_at(0);
    Target t = f.at(f.grid.index(4, 4, 4), {1.0, 0.0});
    t.delay_s += 0.5 * step;
    const OmpResult r = omp(echo_of({t}, f.x, f.cfg), f.x, f.cfg, f.grid, OmpStop{1, 0.0});
    REQUIRE(r.detection.count() == 1u);
    const double err = std::abs(r.detection.estimates[0].range_m - t.range_m());
    CHECK(err == doctest::Approx(range_from_delay(0.5 * step)).epsilon(1e-9));
  }
  SUBCASE("residual never grows") {
    std::mt19937 gen(8);
    std::normal_distribution<double> g;
    std::vector<cplx> y(f.cfg.data_size());
    for (auto& v : y) v = {g(gen), g(gen)};
    const OmpResult r = omp(y, f.x, f.cfg, f.grid, OmpStop{8, 0.0});
    CHECK(r.residual_norms.size() == 9u);
    for (std::size_t i = 1; i < r.residual_norms.size(); ++i)
      CHECK(r.residual_norms[i] <= r.residual_norms[i - 1] * (1.0 + 1e-12));
  }
  SUBCASE("residual tolerance stops early") {
    const std::size_t g0 = f.grid.index(3, 3, 3);
    const auto y = echo_of({f.at(g0, {1.0, 0.0})}, f.x, f.cfg);
    const OmpResult r = omp(y, f.x, f.cfg, f.grid, OmpStop{5, 1e-6});
    CHECK(r.selected.size() == 1u);
  }
  SUBCASE("empty grid") {
    GridSpec g = f.grid;
    g.n_angle = 0;
    CHECK_THROWS_AS(omp(std::vector<cplx>(f.cfg.data_size()), f.x, f.cfg, g, OmpStop{}), Error);
  }
}

TEST_CASE("periodogram") {
  Fixture f;
  SUBCASE("peak at the target") {
    const std::size_t g0 = f.grid.index(5, 2, 6);
    const auto y = echo_of({f.at(g0, {0.0, 2.0})}, f.x, f.cfg);
    const PowerMap pm = periodogram(y, f.x, f.cfg, f.grid, 4);
    REQUIRE(!pm.peaks.empty());
    CHECK(pm.peaks[0].index == g0);
    // |a^H a b|^2 / ||a||^2 = |b|^2 ||a||^2
    const GridPoint p = f.grid.point(g0);
    double e = 0.0;
    for (const cplx& v : oracle::atom(p.delay_s, p.doppler_hz, p.angle_rad, f.x, f.cfg)) e += std::norm(v);
    CHECK(pm.peaks[0].power == doctest::Approx(4.0 * e));
    for (std::size_t i = 1; i < pm.peaks.size(); ++i) CHECK(pm.peaks[i].power <= pm.peaks[i - 1].power);
  }
  SUBCASE("invariant to a common phase") {
    const auto y = echo_of({f.at(f.grid.index(1, 1, 1), {1.0, 0.0}), f.at(f.grid.index(7, 5, 3), {0.4, 0.2})},
                           f.x, f.cfg);
    auto yr = y;
    for (auto& v : yr) v *= oracle::expj(1.234);
    const auto a = periodogram(y, f.x, f.cfg, f.grid).power, b = periodogram(yr, f.x, f.cfg, f.grid).power;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9 * std::max(1.0, a[i]));
  }
  SUBCASE("noise floor") {
    Rng rng(4);
    const double s2 = 0.5;
    double sum = 0.0;
    std::size_t n = 0;
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<cplx> z(f.cfg.data_size());
      for (auto& v : z) v = complex_normal(rng, s2);
      const PowerMap pm = periodogram(z, f.x, f.cfg, f.grid, 1);
      for (double p : pm.power) sum += p;
      n += pm.power.size();
      CHECK(pm.peaks[0].power < s2 * (std::log(static_cast<double>(f.grid.size())) + 10.0));
    }
    CHECK(sum / static_cast<double>(n) == doctest::Approx(s2).epsilon(0.1));
  }
}

TEST_CASE("matched-filter range cut") {
  const SystemConfig cfg;
  Rng rng(2);
  const CTensor3 x = generate_symbols(cfg, rng);
  const RayleighCells c = rayleigh_cells(cfg);
  // Maxima within a quarter cell of each target, and within the span between them.
  auto maxima = [&](double sep_cells) {
    const std::vector<Target> ts{Target::from_kinematics(200.0, 10.0, 0.3, {1.0, 0.0}, cfg),
                                 Target::from_kinematics(200.0 + sep_cells * c.range_m, 10.0, 0.3, {1.0, 0.0}, cfg)};
    const auto y = noiseless_echo(ts, x, cfg);
    const double mid = delay_from_range(200.0 + 0.5 * sep_cells * c.range_m);
    const auto r = range_cut_maxima(y, x, cfg, {mid - 3.0 * c.delay_s, mid + 3.0 * c.delay_s}, 385,
                                    ts[0].doppler_hz, 0.3);
    std::array<std::size_t, 3> count{0, 0, 0};
    for (double rm : r) {
      if (std::abs(rm - ts[0].range_m()) < 0.25 * c.range_m) ++count[0];
      if (std::abs(rm - ts[1].range_m()) < 0.25 * c.range_m) ++count[1];
      if (std::abs(rm - range_from_delay(mid)) < (0.5 * sep_cells + 0.25) * c.range_m) ++count[2];
    }
    return count;
  };
  // Half a cell apart: one merged maximum between the two.
  CHECK(maxima(0.5)[2] == 1u);
  // Three cells apart: a distinct maximum at each target.
  CHECK(maxima(3.0)[0] == 1u);
  CHECK(maxima(3.0)[1] == 1u);
}

}  // TEST_SUITE
