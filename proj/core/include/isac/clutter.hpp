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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isac/posterior.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// Reflection magnitude under the radar equation, normalized so that a
/// reference scatterer at `reference_range_m` has unit amplitude:
/// |b| = sqrt(rcs_ratio) * (reference_range_m / r)^2.
double radar_equation_amplitude(double range_m, double rcs_ratio = 1.0,
                                double reference_range_m = 50.0);

struct ClutterConfig {
  std::size_t count_min = 10;
  std::size_t count_max = 15;
  Interval velocity_mps{-1.0, 1.0};
  Interval range_m{50.0, 600.0};
  Interval angle_rad{-80.0 * std::numbers::pi / 180.0, 80.0 * std::numbers::pi / 180.0};
  double gain = 10.0;  ///< amplitude multiplier over a reference target at the same range
  double alpha = 0.9;
  std::size_t transient_symbols = 30;

  /// Throws Error(kConfig).
  void validate(const SystemConfig& cfg) const;
};

/// Structured near-zero-Doppler scatterers with uniform random phase.
std::vector<Target> generate_clutter(const ClutterConfig& cc, const SystemConfig& cfg, Rng& rng);

struct Suppressed {
  CTensor3 rx;                   ///< filtered observation, all K symbols
  std::size_t valid_k_start = 0;  ///< first symbol past the transient
};

/// Recursive background subtraction along the symbol axis, per (m, n):
/// B_0 = Y_0, out_k = Y_k - B_{k-1}, B_k = alpha B_{k-1} + (1 - alpha) Y_k.
/// Throws Error(kInput) when K <= transient_symbols or alpha is not in (0, 1).
Suppressed suppress(const CTensor3& rx, double alpha, std::size_t transient_symbols);

/// Filtered observation restricted to the stable symbols, paired with the
/// matching transmit symbols and geometry.
struct SuppressedBlock {
  ObservationBlock block;
  SystemConfig cfg;
};
SuppressedBlock suppress_block(const ObservationBlock& block, const SystemConfig& cfg, double alpha,
                               std::size_t transient_symbols);

/// Magnitude response of the suppression filter at a normalized Doppler
/// f_D T_s (cycles per symbol), in steady state.
double suppression_gain(double cycles_per_symbol, double alpha);

/// 10 log10(P_target / (P_clutter + noise_var)) with per-entry mean powers of
/// the noiseless target-only and clutter-only echoes. Throws Error(kInput)
/// without targets.
double scnr_db(const Scene& scene, const CTensor3& tx, const SystemConfig& cfg);

/// Symbols that repeat across OFDM symbols: i.i.d. QPSK over subcarriers and
/// antennas, constant in k. Static scatterers then give a constant stream.
CTensor3 generate_repeated_symbols(const SystemConfig& cfg, Rng& rng);

}  // namespace isac
