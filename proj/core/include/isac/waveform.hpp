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

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "isac/rng.hpp"

namespace isac {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// MIMO-OFDM array and frame geometry. Antenna spacing is fixed at half a
/// wavelength.
struct SystemConfig {
  std::size_t n_antennas = 8;
  std::size_t n_subcarriers = 128;
  std::size_t n_symbols = 14;
  double carrier_hz = 30e9;
  double subcarrier_hz = 120e3;
  double cp_fraction = 0.25;  ///< T_cp / T_d

  static constexpr double kSpacingRatio = 0.5;  ///< d / lambda

  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
  double antenna_spacing_m() const { return kSpacingRatio * wavelength_m(); }
  double data_duration_s() const { return 1.0 / subcarrier_hz; }
  double symbol_period_s() const { return data_duration_s() * (1.0 + cp_fraction); }
  double bandwidth_hz() const { return static_cast<double>(n_subcarriers) * subcarrier_hz; }

  /// H = M K N, the length of the vectorized observation.
  std::size_t data_size() const { return n_subcarriers * n_symbols * n_antennas; }

  /// Throws Error(kConfig) when a field is out of range.
  void validate() const;
};

double delay_from_range(double range_m);
double range_from_delay(double delay_s);
double doppler_from_velocity(double velocity_mps, double wavelength_m);
double velocity_from_doppler(double doppler_hz, double wavelength_m);

/// Point scatterer in delay / Doppler / angle coordinates.
struct Target {
  cplx refl{1.0, 0.0};
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double angle_rad = 0.0;

  double range_m() const { return range_from_delay(delay_s); }
  double velocity_mps(double wavelength_m) const {
    return velocity_from_doppler(doppler_hz, wavelength_m);
  }

  static Target from_kinematics(double range_m, double velocity_mps, double angle_rad, cplx refl,
                                const SystemConfig& cfg);
};

struct Scene {
  std::vector<Target> targets;
  std::vector<Target> clutter;
  double noise_var = 1.0;
};

/// Dense complex tensor indexed [m][k][n] with n fastest, then k, then m.
/// The storage order is the vectorization order of the observation.
class CTensor3 {
 public:
  CTensor3() = default;
  CTensor3(std::size_t m, std::size_t k, std::size_t n)
      : m_(m), k_(k), n_(n), data_(m * k * n, cplx{0.0, 0.0}) {}

  static CTensor3 from_vector(std::size_t m, std::size_t k, std::size_t n, std::vector<cplx> v);

  std::size_t subcarriers() const { return m_; }
  std::size_t symbols() const { return k_; }
  std::size_t antennas() const { return n_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(std::size_t m, std::size_t k, std::size_t n) const {
    return (m * k_ + k) * n_ + n;
  }
  cplx& operator()(std::size_t m, std::size_t k, std::size_t n) { return data_[index(m, k, n)]; }
  const cplx& operator()(std::size_t m, std::size_t k, std::size_t n) const {
    return data_[index(m, k, n)];
  }

  /// Pointer to the N-vector x_{m,k}.
  const cplx* resource(std::size_t m, std::size_t k) const { return data_.data() + index(m, k, 0); }

  std::span<const cplx> vectorized() const { return data_; }
  std::span<cplx> vectorized() { return data_; }

  bool same_shape(const SystemConfig& cfg) const {
    return m_ == cfg.n_subcarriers && k_ == cfg.n_symbols && n_ == cfg.n_antennas;
  }

 private:
  std::size_t m_ = 0, k_ = 0, n_ = 0;
  std::vector<cplx> data_;
};

struct ObservationBlock {
  CTensor3 tx;  ///< X[m][k][n]
  CTensor3 rx;  ///< Y[m][k][n]

  std::span<const cplx> y() const { return rx.vectorized(); }
};

/// a(theta)_n = exp(j 2 pi n (d / lambda) sin theta), n = 0..N-1.
std::vector<cplx> steering_vector(double angle_rad, const SystemConfig& cfg);

/// Space-time steering atom d(tau, f_D, theta) of length M K N in
/// vectorization order. Throws Error(kInput) if X does not match cfg.
std::vector<cplx> atom(double delay_s, double doppler_hz, double angle_rad, const CTensor3& tx,
                       const SystemConfig& cfg);

/// i.i.d. unit-modulus QPSK symbols (+-1 +- j) / sqrt(2).
CTensor3 generate_symbols(const SystemConfig& cfg, Rng& rng);

/// Noiseless superposition sum_l b_l d(tau_l, f_l, theta_l).
std::vector<cplx> noiseless_echo(std::span<const Target> targets, const CTensor3& tx,
                                 const SystemConfig& cfg);

/// Y = targets + clutter + CN(0, noise_var) noise.
ObservationBlock synthesize(const Scene& scene, const CTensor3& tx, const SystemConfig& cfg,
                            Rng& rng);

double mean_power(std::span<const cplx> v);

/// Noise variance giving `snr_db` relative to the mean per-entry power of the
/// noiseless target-only echo. Throws Error(kInput) on an empty target list.
double noise_var_for_snr(double snr_db, std::span<const Target> targets, const CTensor3& tx,
                         const SystemConfig& cfg);

/// Copy of the block restricted to OFDM symbols k >= k_start, re-indexed from 0.
ObservationBlock slice_symbols(const ObservationBlock& block, std::size_t k_start);

/// Geometry with n_symbols replaced; pairs with slice_symbols.
SystemConfig with_symbols(SystemConfig cfg, std::size_t n_symbols);

}  // namespace isac
