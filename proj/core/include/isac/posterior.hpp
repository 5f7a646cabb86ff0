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
#include <limits>
#include <span>
#include <vector>

#include "isac/waveform.hpp"

namespace isac {

/// Returned by log densities for a state outside the prior support.
inline constexpr double kOutsideSupport = -std::numeric_limits<double>::infinity();

inline bool outside_support(double log_density) { return log_density == kOutsideSupport; }

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool interior(double x) const { return x > lo && x < hi; }
};

/// Gaussian N(mean, sd^2) truncated to `support`.
struct TruncatedGaussian {
  Interval support;
  double mean = 0.5;
  double sd = 0.5;

  /// Midpoint mean and half-width deviation: nearly flat over the support.
  static TruncatedGaussian centered(Interval support);

  double log_normalizer() const;  ///< log(sd * Z(lo, hi))
  double log_density(double x) const;
  double grad(double x) const { return -(x - mean) / (sd * sd); }
  double sample(Rng& rng) const;
};

/// Gamma(shape, rate) with density rate^shape x^(shape-1) e^(-rate x) / Gamma(shape).
struct GammaPrior {
  double shape = 2.0;
  double rate = 0.01;

  double log_density(double x) const;
  double grad(double x) const { return (shape - 1.0) / x - rate; }
  double sample(Rng& rng) const;
};

/// Hyperparameters of the hierarchical gridless model. Physical parameters
/// are in seconds, hertz and radians.
struct PriorConfig {
  std::size_t q = 10;
  TruncatedGaussian delay;
  TruncatedGaussian doppler;
  TruncatedGaussian angle;
  GammaPrior rho{2.0, 0.01};
  GammaPrior xi{3.0, 0.01};
  Interval rho_bounds{1e-8, 1e4};
  Interval xi_bounds{1e-8, 1e8};

  /// Centered truncated Gaussians over the given physical boxes.
  static PriorConfig from_bounds(std::size_t q, Interval delay_s, Interval doppler_hz,
                                 Interval angle_rad);

  /// Throws Error(kConfig); enforces shape_rho > 1 and shape_xi > 2.
  void validate() const;
};

/// Sampling variables eta = [tau, f_D, theta, Re b, Im b, rho, xi],
/// flattened in that order to F = 6Q + 1 reals.
struct ParamState {
  std::vector<double> delay;
  std::vector<double> doppler;
  std::vector<double> angle;
  std::vector<double> b_re;
  std::vector<double> b_im;
  std::vector<double> rho;
  double xi = 1.0;

  ParamState() = default;
  explicit ParamState(std::size_t q)
      : delay(q, 0.0), doppler(q, 0.0), angle(q, 0.0), b_re(q, 0.0), b_im(q, 0.0), rho(q, 1.0) {}

  std::size_t q() const { return delay.size(); }
  std::size_t dim() const { return dimension(q()); }
  static std::size_t dimension(std::size_t q) { return 6 * q + 1; }

  cplx b(std::size_t i) const { return {b_re[i], b_im[i]}; }
  std::vector<cplx> coefficients() const;

  std::vector<double> flatten() const;
  static ParamState unflatten(std::span<const double> v, std::size_t q);

  /// Offsets of each block inside the flattened vector.
  static std::size_t delay_offset(std::size_t) { return 0; }
  static std::size_t doppler_offset(std::size_t q) { return q; }
  static std::size_t angle_offset(std::size_t q) { return 2 * q; }
  static std::size_t bre_offset(std::size_t q) { return 3 * q; }
  static std::size_t bim_offset(std::size_t q) { return 4 * q; }
  static std::size_t rho_offset(std::size_t q) { return 5 * q; }
  static std::size_t xi_offset(std::size_t q) { return 6 * q; }
};

/// True if every bounded coordinate lies in its support (closed intervals)
/// and rho, xi are inside their boxes.
bool within_support(const ParamState& eta, const PriorConfig& pc);
/// Strict version required by the gradient.
bool strictly_inside(const ParamState& eta, const PriorConfig& pc);

/// A mini-batch of B positions into the vectorized observation.
struct MiniBatch {
  std::vector<std::size_t> indices;
  std::vector<cplx> values;
  std::size_t total = 0;  ///< H

  std::size_t size() const { return indices.size(); }

  static MiniBatch full(std::span<const cplx> y);
  static MiniBatch from_indices(std::span<const cplx> y, std::vector<std::size_t> indices);
  /// Throws Error(kInput) on duplicate or out-of-range positions.
  void validate() const;
};

/// H log(xi / pi) - xi ||y - D b||^2.
double log_likelihood(const ParamState& eta, std::span<const cplx> y, const CTensor3& tx,
                      const SystemConfig& cfg);

/// Sum of all prior factors; kOutsideSupport when a bound is violated.
double log_prior(const ParamState& eta, const PriorConfig& pc);

/// gamma = upsilon ln B / ln H. Throws Error(kInput) for B = 0, B > H or H < 2.
double gamma_exponent(std::size_t batch, std::size_t total, double upsilon);

/// (H^gamma / B) sum_batch log p(y_i | eta) + log p(eta).
double tempered_logpost(const ParamState& eta, const MiniBatch& batch, const PriorConfig& pc,
                        const CTensor3& tx, const SystemConfig& cfg, double gamma);

/// Gradient of tempered_logpost in flattened eta order. Throws Error(kInput)
/// when eta is on or outside a bound.
std::vector<double> grad_tempered(const ParamState& eta, const MiniBatch& batch,
                                  const PriorConfig& pc, const CTensor3& tx,
                                  const SystemConfig& cfg, double gamma);

struct TemperedValue {
  double value = 0.0;
  std::vector<double> grad;  ///< empty unless requested
};

/// Value and (optionally) gradient in a single pass over the batch.
TemperedValue evaluate_tempered(const ParamState& eta, const MiniBatch& batch,
                                const PriorConfig& pc, const CTensor3& tx,
                                const SystemConfig& cfg, double gamma, bool with_grad);

}  // namespace isac
