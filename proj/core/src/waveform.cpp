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

#include "isac/waveform.hpp"

#include <cmath>
#include <string>

#include "isac/errors.hpp"

namespace isac {

void SystemConfig::validate() const {
  if (n_antennas < 1 || n_subcarriers < 1 || n_symbols < 1) {
    throw_config("system: antenna, subcarrier and symbol counts must be >= 1");
  }
  if (!(subcarrier_hz > 0.0) || !std::isfinite(subcarrier_hz)) {
    throw_config("system.subcarrier_hz must be positive");
  }
  if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) {
    throw_config("system.carrier_hz must be positive");
  }
  if (!(cp_fraction >= 0.0) || !std::isfinite(cp_fraction)) {
    throw_config("system.cp_fraction must be non-negative");
  }
}

double delay_from_range(double range_m) { return 2.0 * range_m / kSpeedOfLight; }
double range_from_delay(double delay_s) { return 0.5 * kSpeedOfLight * delay_s; }
double doppler_from_velocity(double velocity_mps, double wavelength_m) {
  return 2.0 * velocity_mps / wavelength_m;
}
double velocity_from_doppler(double doppler_hz, double wavelength_m) {
  return 0.5 * wavelength_m * doppler_hz;
}

Target Target::from_kinematics(double range_m, double velocity_mps, double angle_rad, cplx refl,
                               const SystemConfig& cfg) {
  Target t;
  t.refl = refl;
  t.delay_s = delay_from_range(range_m);
  t.doppler_hz = doppler_from_velocity(velocity_mps, cfg.wavelength_m());
  t.angle_rad = angle_rad;
  return t;
}

CTensor3 CTensor3::from_vector(std::size_t m, std::size_t k, std::size_t n, std::vector<cplx> v) {
  if (v.size() != m * k * n) {
    throw_input("tensor reshape: vector of length " + std::to_string(v.size()) +
                " does not match " + std::to_string(m) + "x" + std::to_string(k) + "x" +
                std::to_string(n));
  }
  CTensor3 t;
  t.m_ = m;
  t.k_ = k;
  t.n_ = n;
  t.data_ = std::move(v);
  return t;
}

std::vector<cplx> steering_vector(double angle_rad, const SystemConfig& cfg) {
  const double phase_step = kTwoPi * SystemConfig::kSpacingRatio * std::sin(angle_rad);
  std::vector<cplx> a(cfg.n_antennas);
  for (std::size_t n = 0; n < a.size(); ++n) {
    a[n] = std::polar(1.0, phase_step * static_cast<double>(n));
  }
  return a;
}

namespace {

void require_shape(const CTensor3& tx, const SystemConfig& cfg, const char* who) {
  if (!tx.same_shape(cfg)) {
    throw_input(std::string(who) + ": transmit tensor shape " +
                std::to_string(tx.subcarriers()) + "x" + std::to_string(tx.symbols()) + "x" +
                std::to_string(tx.antennas()) + " does not match the system configuration");
  }
}

// Adds weight * d(tau, f_D, theta) into out.
void accumulate_atom(cplx weight, double delay_s, double doppler_hz, double angle_rad,
                     const CTensor3& tx, const SystemConfig& cfg, std::span<cplx> out) {
  const std::size_t M = cfg.n_subcarriers, K = cfg.n_symbols, N = cfg.n_antennas;
  const auto a = steering_vector(angle_rad, cfg);
  std::vector<cplx> doppler(K);
  for (std::size_t k = 0; k < K; ++k) {
    doppler[k] = std::polar(1.0, kTwoPi * doppler_hz * cfg.symbol_period_s() * static_cast<double>(k));
  }
  for (std::size_t m = 0; m < M; ++m) {
    const cplx range_phasor =
        weight * std::polar(1.0, -kTwoPi * static_cast<double>(m) * cfg.subcarrier_hz * delay_s);
    for (std::size_t k = 0; k < K; ++k) {
      const cplx* x = tx.resource(m, k);
      cplx beam{0.0, 0.0};
      for (std::size_t n = 0; n < N; ++n) beam += a[n] * x[n];
      const cplx common = range_phasor * doppler[k] * beam;
      cplx* dst = out.data() + tx.index(m, k, 0);
      for (std::size_t n = 0; n < N; ++n) dst[n] += common * a[n];
    }
  }
}

}  // namespace

std::vector<cplx> atom(double delay_s, double doppler_hz, double angle_rad, const CTensor3& tx,
                       const SystemConfig& cfg) {
  require_shape(tx, cfg, "atom");
  std::vector<cplx> d(cfg.data_size(), cplx{0.0, 0.0});
  accumulate_atom(cplx{1.0, 0.0}, delay_s, doppler_hz, angle_rad, tx, cfg, d);
  return d;
}

CTensor3 generate_symbols(const SystemConfig& cfg, Rng& rng) {
  CTensor3 x(cfg.n_subcarriers, cfg.n_symbols, cfg.n_antennas);
  const double h = 1.0 / std::sqrt(2.0);
  std::uniform_int_distribution<int> quadrant(0, 3);
  for (auto& s : x.vectorized()) {
    const int q = quadrant(rng);
    s = cplx{(q & 1) ? -h : h, (q & 2) ? -h : h};
  }
  return x;
}

std::vector<cplx> noiseless_echo(std::span<const Target> targets, const CTensor3& tx,
                                 const SystemConfig& cfg) {
  require_shape(tx, cfg, "noiseless_echo");
  std::vector<cplx> y(cfg.data_size(), cplx{0.0, 0.0});
  for (const auto& t : targets) {
    accumulate_atom(t.refl, t.delay_s, t.doppler_hz, t.angle_rad, tx, cfg, y);
  }
  return y;
}

ObservationBlock synthesize(const Scene& scene, const CTensor3& tx, const SystemConfig& cfg,
                            Rng& rng) {
  require_shape(tx, cfg, "synthesize");
  std::vector<cplx> y(cfg.data_size(), cplx{0.0, 0.0});
  for (const auto& t : scene.targets) {
    accumulate_atom(t.refl, t.delay_s, t.doppler_hz, t.angle_rad, tx, cfg, y);
  }
  for (const auto& c : scene.clutter) {
    accumulate_atom(c.refl, c.delay_s, c.doppler_hz, c.angle_rad, tx, cfg, y);
  }
  if (scene.noise_var > 0.0) {
    for (auto& v : y) v += complex_normal(rng, scene.noise_var);
  }
  ObservationBlock block;
  block.tx = tx;
  block.rx = CTensor3::from_vector(cfg.n_subcarriers, cfg.n_symbols, cfg.n_antennas, std::move(y));
  return block;
}

double mean_power(std::span<const cplx> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc / static_cast<double>(v.size());
}

double noise_var_for_snr(double snr_db, std::span<const Target> targets, const CTensor3& tx,
                         const SystemConfig& cfg) {
  if (targets.empty()) throw_input("noise_var_for_snr: scene has no targets");
  const double p_sig = mean_power(noiseless_echo(targets, tx, cfg));
  return p_sig / std::pow(10.0, snr_db / 10.0);
}

ObservationBlock slice_symbols(const ObservationBlock& block, std::size_t k_start) {
  const std::size_t M = block.rx.subcarriers(), K = block.rx.symbols(), N = block.rx.antennas();
  if (k_start >= K) throw_input("slice_symbols: start symbol beyond the frame");
  const std::size_t K2 = K - k_start;
  ObservationBlock out{CTensor3(M, K2, N), CTensor3(M, K2, N)};
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t k = 0; k < K2; ++k) {
      for (std::size_t n = 0; n < N; ++n) {
        out.tx(m, k, n) = block.tx(m, k + k_start, n);
        out.rx(m, k, n) = block.rx(m, k + k_start, n);
      }
    }
  }
  return out;
}

SystemConfig with_symbols(SystemConfig cfg, std::size_t n_symbols) {
  cfg.n_symbols = n_symbols;
  return cfg;
}

}  // namespace isac
