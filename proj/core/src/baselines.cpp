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

#include "isac/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "isac/errors.hpp"

namespace isac {

RayleighCells rayleigh_cells(const SystemConfig& cfg) {
  RayleighCells c;
  const double lambda = cfg.wavelength_m();
  c.delay_s = 1.0 / (static_cast<double>(cfg.n_subcarriers) * cfg.subcarrier_hz);
  c.range_m = kSpeedOfLight / (2.0 * cfg.bandwidth_hz());
  c.doppler_hz = 1.0 / (static_cast<double>(cfg.n_symbols) * cfg.symbol_period_s());
  c.velocity_mps = lambda / (2.0 * static_cast<double>(cfg.n_symbols) * cfg.symbol_period_s());
  const double aperture = lambda * static_cast<double>(cfg.n_antennas - 1) / 2.0;
  c.angle_rad = cfg.n_antennas > 1 ? 0.886 * lambda / aperture : std::numbers::pi;
  return c;
}

namespace {

double grid_at(const Interval& iv, std::size_t n, std::size_t i) {
  if (n <= 1) return iv.mid();
  return iv.lo + iv.width() * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::size_t points_for(double width, double cell, double per_cell) {
  if (!(width > 0.0)) return 1;
  return static_cast<std::size_t>(std::ceil(per_cell * width / cell)) + 1;
}

}  // namespace

double GridSpec::delay_at(std::size_t i) const { return grid_at(delay_s, n_delay, i); }
double GridSpec::doppler_at(std::size_t i) const { return grid_at(doppler_hz, n_doppler, i); }
double GridSpec::angle_at(std::size_t i) const { return grid_at(angle_rad, n_angle, i); }

GridPoint GridSpec::point(std::size_t g) const {
  const std::size_t i_delay = g % n_delay;
  const std::size_t i_doppler = (g / n_delay) % n_doppler;
  const std::size_t i_angle = g / (n_delay * n_doppler);
  return GridPoint{delay_at(i_delay), doppler_at(i_doppler), angle_at(i_angle)};
}

GridSpec GridSpec::per_cell(const SystemConfig& cfg, Interval delay, Interval doppler,
                            Interval angle, double points_per_cell) {
  if (!(points_per_cell > 0.0)) throw_config("grid: points per cell must be positive");
  const RayleighCells cells = rayleigh_cells(cfg);
  GridSpec g;
  g.delay_s = delay;
  g.doppler_hz = doppler;
  g.angle_rad = angle;
  g.n_delay = points_for(delay.width(), cells.delay_s, points_per_cell);
  g.n_doppler = points_for(doppler.width(), cells.doppler_hz, points_per_cell);
  g.n_angle = points_for(angle.width(), cells.angle_rad, points_per_cell);
  return g;
}

void GridSpec::validate() const {
  if (size() == 0) throw_config("grid: every dimension needs at least one point");
  if (delay_s.lo > delay_s.hi || doppler_hz.lo > doppler_hz.hi || angle_rad.lo > angle_rad.hi) {
    throw_config("grid: lower bound above upper bound");
  }
}

GridCorrelator::GridCorrelator(GridSpec grid, const CTensor3& tx, const SystemConfig& cfg)
    : grid_(grid), cfg_(cfg) {
  grid_.validate();
  if (!tx.same_shape(cfg)) throw_input("grid correlator: transmit tensor does not match configuration");
  const std::size_t M = cfg.n_subcarriers, K = cfg.n_symbols, N = cfg.n_antennas;
  const std::size_t PT = grid_.n_angle, PF = grid_.n_doppler, PD = grid_.n_delay;

  steer_.resize(PT * N);
  beam_conj_.resize(PT * M * K);
  energy_.assign(PT, 0.0);
  for (std::size_t it = 0; it < PT; ++it) {
    const auto a = steering_vector(grid_.angle_at(it), cfg);
    std::copy(a.begin(), a.end(), steer_.begin() + static_cast<std::ptrdiff_t>(it * N));
    double e = 0.0;
    for (std::size_t mk = 0; mk < M * K; ++mk) {
      const cplx* x = tx.resource(mk / K, mk % K);
      cplx s{0.0, 0.0};
      for (std::size_t n = 0; n < N; ++n) s += a[n] * x[n];
      beam_conj_[it * M * K + mk] = std::conj(s);
      e += std::norm(s);
    }
    energy_[it] = e * static_cast<double>(N);
  }

  doppler_tab_.resize(K * PF);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t f = 0; f < PF; ++f) {
      doppler_tab_[k * PF + f] = std::polar(
          1.0, -kTwoPi * static_cast<double>(k) * grid_.doppler_at(f) * cfg.symbol_period_s());
    }
  }
  delay_tab_.resize(M * PD);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t d = 0; d < PD; ++d) {
      delay_tab_[m * PD + d] =
          std::polar(1.0, kTwoPi * static_cast<double>(m) * cfg.subcarrier_hz * grid_.delay_at(d));
    }
  }
}

std::vector<cplx> GridCorrelator::correlate(std::span<const cplx> r) const {
  const std::size_t M = cfg_.n_subcarriers, K = cfg_.n_symbols, N = cfg_.n_antennas;
  const std::size_t PT = grid_.n_angle, PF = grid_.n_doppler, PD = grid_.n_delay;
  if (r.size() != M * K * N) throw_input("grid correlator: observation length mismatch");
  std::vector<cplx> out(grid_.size());
  std::vector<cplx> z(M * K), u(M * PF);
  for (std::size_t it = 0; it < PT; ++it) {
    const cplx* a = steer_.data() + it * N;
    const cplx* bc = beam_conj_.data() + it * M * K;
    for (std::size_t mk = 0; mk < M * K; ++mk) {
      const cplx* rv = r.data() + mk * N;
      cplx acc{0.0, 0.0};
      for (std::size_t n = 0; n < N; ++n) acc += std::conj(a[n]) * rv[n];
      z[mk] = bc[mk] * acc;
    }
    std::fill(u.begin(), u.end(), cplx{0.0, 0.0});
    for (std::size_t m = 0; m < M; ++m) {
      for (std::size_t k = 0; k < K; ++k) {
        const cplx zmk = z[m * K + k];
        const cplx* dt = doppler_tab_.data() + k * PF;
        cplx* um = u.data() + m * PF;
        for (std::size_t f = 0; f < PF; ++f) um[f] += zmk * dt[f];
      }
    }
    for (std::size_t f = 0; f < PF; ++f) {
      cplx* dst = out.data() + grid_.index(0, f, it);
      for (std::size_t m = 0; m < M; ++m) {
        const cplx umf = u[m * PF + f];
        const cplx* rt = delay_tab_.data() + m * PD;
        for (std::size_t d = 0; d < PD; ++d) dst[d] += umf * rt[d];
      }
    }
  }
  return out;
}

double GridCorrelator::atom_energy(std::size_t g) const {
  return energy_[g / (grid_.n_delay * grid_.n_doppler)];
}

PowerMap periodogram(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                     const GridSpec& grid, std::size_t max_peaks) {
  const GridCorrelator corr(grid, tx, cfg);
  const auto c = corr.correlate(y);
  PowerMap map;
  map.grid = grid;
  map.power.resize(c.size());
  for (std::size_t g = 0; g < c.size(); ++g) {
    const double e = corr.atom_energy(g);
    map.power[g] = e > 0.0 ? std::norm(c[g]) / e : 0.0;
  }

  const RayleighCells cells = rayleigh_cells(cfg);
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return map.power[a] > map.power[b]; });
  for (std::size_t g : order) {
    if (map.peaks.size() >= max_peaks) break;
    const GridPoint p = grid.point(g);
    bool suppressed = false;
    for (const auto& pk : map.peaks) {
      if (std::abs(p.delay_s - pk.point.delay_s) < cells.delay_s &&
          std::abs(p.doppler_hz - pk.point.doppler_hz) < cells.doppler_hz &&
          std::abs(p.angle_rad - pk.point.angle_rad) < cells.angle_rad) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) map.peaks.push_back(Peak{g, p, map.power[g]});
  }
  return map;
}

std::vector<double> range_cut_maxima(std::span<const cplx> y, const CTensor3& tx,
                                     const SystemConfig& cfg, Interval delay_s,
                                     std::size_t n_points, double doppler_hz, double angle_rad) {
  GridSpec g;
  g.delay_s = delay_s;
  g.doppler_hz = Interval{doppler_hz, doppler_hz};
  g.angle_rad = Interval{angle_rad, angle_rad};
  g.n_delay = n_points;
  const GridCorrelator corr(g, tx, cfg);
  const auto c = corr.correlate(y);
  std::vector<double> maxima;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double p = std::norm(c[i]);
    const bool left = i == 0 || p > std::norm(c[i - 1]);
    const bool right = i + 1 == c.size() || p >= std::norm(c[i + 1]);
    if (left && right) maxima.push_back(range_from_delay(g.delay_at(i)));
  }
  return maxima;
}

OmpResult omp(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
              const GridSpec& grid, const OmpStop& stop) {
  const GridCorrelator corr(grid, tx, cfg);
  return omp(y, tx, cfg, corr, stop);
}

OmpResult omp(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
              const GridCorrelator& corr, const OmpStop& stop) {
  using CVec = Eigen::VectorXcd;
  using CMat = Eigen::MatrixXcd;
  const GridSpec& grid = corr.grid();
  grid.validate();
  const std::size_t H = cfg.data_size();
  if (y.size() != H) throw_input("omp: observation length mismatch");

  const Eigen::Map<const CVec> yv(y.data(), static_cast<Eigen::Index>(H));
  CVec residual = yv;
  const double y_energy = yv.squaredNorm();
  OmpResult res;
  res.residual_norms.push_back(std::sqrt(y_energy));
  CMat A(static_cast<Eigen::Index>(H), 0);
  CVec coef;

  const std::size_t limit = std::min(stop.max_targets, grid.size());
  while (res.selected.size() < limit) {
    if (residual.squaredNorm() <= stop.residual_tol * y_energy) break;
    // Numerically exhausted residual; more atoms would only fit round-off.
    if (residual.squaredNorm() <= 1e-26 * y_energy) break;
    const auto c = corr.correlate(std::span<const cplx>(residual.data(), H));
    std::size_t best = grid.size();
    double best_score = -1.0;
    for (std::size_t g = 0; g < c.size(); ++g) {
      if (std::find(res.selected.begin(), res.selected.end(), g) != res.selected.end()) continue;
      const double e = corr.atom_energy(g);
      if (!(e > 0.0)) continue;
      const double s = std::norm(c[g]) / e;
      if (s > best_score) {
        best_score = s;
        best = g;
      }
    }
    if (best == grid.size()) break;
    res.selected.push_back(best);
    const GridPoint p = grid.point(best);
    const auto d = atom(p.delay_s, p.doppler_hz, p.angle_rad, tx, cfg);
    A.conservativeResize(Eigen::NoChange, A.cols() + 1);
    A.col(A.cols() - 1) = Eigen::Map<const CVec>(d.data(), static_cast<Eigen::Index>(H));
    coef = A.colPivHouseholderQr().solve(yv);
    residual = yv - A * coef;
    res.residual_norms.push_back(residual.norm());
  }

  res.coefficients.assign(coef.data(), coef.data() + coef.size());
  std::vector<std::size_t> order(res.selected.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::norm(res.coefficients[a]) > std::norm(res.coefficients[b]);
  });
  for (std::size_t i : order) {
    const GridPoint p = grid.point(res.selected[i]);
    Estimate e;
    e.range_m = range_from_delay(p.delay_s);
    e.velocity_mps = velocity_from_doppler(p.doppler_hz, cfg.wavelength_m());
    e.angle_rad = p.angle_rad;
    e.refl = res.coefficients[i];
    res.detection.active_slots.push_back(i);
    res.detection.estimates.push_back(e);
  }
  return res;
}

}  // namespace isac
