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

#include "isac/clutter.hpp"

#include <cmath>

#include "isac/errors.hpp"

namespace isac {

double radar_equation_amplitude(double range_m, double rcs_ratio, double reference_range_m) {
  const double ratio = reference_range_m / range_m;
  return std::sqrt(rcs_ratio) * ratio * ratio;
}

void ClutterConfig::validate(const SystemConfig& cfg) const {
  if (count_min > count_max) throw_config("clutter: count_min exceeds count_max");
  if (!(alpha > 0.0 && alpha < 1.0)) throw_config("clutter.alpha must lie in (0, 1)");
  if (!(gain > 0.0)) throw_config("clutter.gain must be positive");
  if (!(velocity_mps.lo <= velocity_mps.hi)) throw_config("clutter: velocity band inverted");
  const double v_max = velocity_from_doppler(0.5 / cfg.symbol_period_s(), cfg.wavelength_m());
  if (std::abs(velocity_mps.lo) >= v_max || std::abs(velocity_mps.hi) >= v_max) {
    throw_config("clutter: velocity band exceeds the unambiguous Doppler range");
  }
  if (!(range_m.lo > 0.0 && range_m.lo <= range_m.hi)) throw_config("clutter: invalid range interval");
  if (!(angle_rad.lo <= angle_rad.hi)) throw_config("clutter: angle interval inverted");
}

std::vector<Target> generate_clutter(const ClutterConfig& cc, const SystemConfig& cfg, Rng& rng) {
  cc.validate(cfg);
  std::uniform_int_distribution<std::size_t> count(cc.count_min, cc.count_max);
  std::uniform_real_distribution<double> range(cc.range_m.lo, cc.range_m.hi);
  std::uniform_real_distribution<double> angle(cc.angle_rad.lo, cc.angle_rad.hi);
  std::uniform_real_distribution<double> velocity(cc.velocity_mps.lo, cc.velocity_mps.hi);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const std::size_t n = count(rng);
  std::vector<Target> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = range(rng);
    const double th = angle(rng);
    const double v = velocity(rng);
    const cplx b = std::polar(cc.gain * radar_equation_amplitude(r), phase(rng));
    out.push_back(Target::from_kinematics(r, v, th, b, cfg));
  }
  return out;
}

Suppressed suppress(const CTensor3& rx, double alpha, std::size_t transient_symbols) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_input("suppress: alpha must lie in (0, 1)");
  const std::size_t M = rx.subcarriers(), K = rx.symbols(), N = rx.antennas();
  if (K <= transient_symbols) {
    throw_input("suppress: " + std::to_string(K) + " symbols do not exceed the transient of " +
                std::to_string(transient_symbols));
  }
  Suppressed out{CTensor3(M, K, N), transient_symbols};
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < N; ++n) {
      cplx background = rx(m, 0, n);
      out.rx(m, 0, n) = cplx{0.0, 0.0};
      for (std::size_t k = 1; k < K; ++k) {
        const cplx v = rx(m, k, n);
        out.rx(m, k, n) = v - background;
        background = alpha * background + (1.0 - alpha) * v;
      }
    }
  }
  return out;
}

SuppressedBlock suppress_block(const ObservationBlock& block, const SystemConfig& cfg, double alpha,
                               std::size_t transient_symbols) {
  const Suppressed s = suppress(block.rx, alpha, transient_symbols);
  const ObservationBlock filtered{block.tx, s.rx};
  SuppressedBlock out;
  out.block = slice_symbols(filtered, s.valid_k_start);
  out.cfg = with_symbols(cfg, cfg.n_symbols - s.valid_k_start);
  return out;
}

double suppression_gain(double cycles_per_symbol, double alpha) {
  const cplx z_inv = std::polar(1.0, -kTwoPi * cycles_per_symbol);
  return std::abs((1.0 - z_inv) / (1.0 - alpha * z_inv));
}

double scnr_db(const Scene& scene, const CTensor3& tx, const SystemConfig& cfg) {
  if (scene.targets.empty()) throw_input("scnr: scene has no targets");
  const double p_t = mean_power(noiseless_echo(scene.targets, tx, cfg));
  const double p_c = scene.clutter.empty() ? 0.0 : mean_power(noiseless_echo(scene.clutter, tx, cfg));
  return 10.0 * std::log10(p_t / (p_c + scene.noise_var));
}

CTensor3 generate_repeated_symbols(const SystemConfig& cfg, Rng& rng) {
  const SystemConfig one = with_symbols(cfg, 1);
  const CTensor3 base = generate_symbols(one, rng);
  CTensor3 x(cfg.n_subcarriers, cfg.n_symbols, cfg.n_antennas);
  for (std::size_t m = 0; m < cfg.n_subcarriers; ++m) {
    for (std::size_t k = 0; k < cfg.n_symbols; ++k) {
      for (std::size_t n = 0; n < cfg.n_antennas; ++n) x(m, k, n) = base(m, 0, n);
    }
  }
  return x;
}

}  // namespace isac
