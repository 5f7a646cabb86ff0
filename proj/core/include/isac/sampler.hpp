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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "isac/posterior.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// How the chain's starting state is chosen.
enum class InitMode {
  kPrior,          ///< every coordinate drawn from its prior, b = 0
  kMatchedFilter,  ///< greedy grid pursuit over the prior box, Q atoms
};

/// Coordinates in which the Adam proposal moves.
enum class Scaling {
  /// Bounded coordinates divided by their interval width; b, rho, xi in
  /// natural units. Out-of-box proposals are rejected.
  kInterval,
  /// Bounded coordinates through a scaled logit, rho and xi through a scaled
  /// log; local scales set from the tempered Fisher information at the
  /// starting state. Jacobian terms are part of the target.
  kCurvature,
};

std::string_view init_mode_name(InitMode m);
std::string_view scaling_name(Scaling s);
/// Throw Error(kConfig) on unknown names.
InitMode parse_init_mode(std::string_view name);
Scaling parse_scaling(std::string_view name);

struct SamplerConfig {
  std::size_t batch_size = 128;
  double step0 = 0.15;
  double beta1 = 0.9;
  double beta2 = 0.9999;
  double eps_stab = 1e-8;
  std::size_t n_burn = 40000;
  std::size_t n_samples = 5000;
  double upsilon = 0.9;
  std::uint64_t seed = 0;
  std::size_t chains = 1;  ///< independent chains, best kept by full-data log-posterior

  InitMode init = InitMode::kMatchedFilter;
  Scaling scaling = Scaling::kCurvature;
  /// Curvature scaling: step unit as a multiple of the local posterior deviation.
  double curvature_gain = 3.0;
  /// Curvature scaling: cap on the delay, Doppler and angle units in Rayleigh
  /// cells. Binds at low SNR, where a wide unit lets a slot drift off its target.
  double max_unit_cells = 0.05;
  /// Grid density of the matched-filter start.
  double init_points_per_cell = 2.0;
  /// Rescale the observation to unit mean power before sampling.
  bool normalize_power = true;

  std::size_t iterations() const { return n_burn + n_samples; }
  /// Throws Error(kConfig); `data_size` is H.
  void validate(std::size_t data_size) const;
};

struct AdamState {
  std::vector<double> w;
  std::vector<double> v;
  std::size_t t = 0;

  AdamState() = default;
  explicit AdamState(std::size_t dim) : w(dim, 0.0), v(dim, 0.0) {}
};

struct AdamStep {
  std::vector<double> drift;      ///< w_hat / (sqrt(v_hat) + eps)
  std::vector<double> noise_var;  ///< 2 eps_t / (sqrt(v_hat) + eps)
};

/// eps0 / (1 + t^0.005), with 0^0.005 taken as 0.
double learning_rate(std::size_t t, double step0);

/// Advances the moments by one step (t <- t + 1) and returns the drift and
/// per-coordinate noise variance for learning rate `step`.
AdamStep adam_update(AdamState& adam, std::span<const double> grad, const SamplerConfig& sc,
                     double step);

/// eta + step * drift + n with n_i ~ N(0, noise_var_i). A null rng gives the
/// noise-free move.
std::vector<double> propose(std::span<const double> eta, const AdamStep& adam, double step,
                            Rng* rng);

/// Metropolis test in the log domain; always consumes one uniform draw.
bool mh_accept(double log_new, double log_old, Rng& rng);

/// Mini-batch positions drawn uniformly without replacement.
class BatchSampler {
 public:
  BatchSampler(std::size_t total, std::size_t batch);
  /// Positions valid until the next call.
  std::span<const std::size_t> draw(Rng& rng);

 private:
  std::vector<std::size_t> perm_;
  std::size_t batch_;
};

/// Element-wise reparametrization between the sampler's unit coordinates u
/// and the model parameters eta.
class CoordinateMap {
 public:
  enum class Kind { kLinear, kLog, kLogit };

  struct Axis {
    Kind kind = Kind::kLinear;
    double scale = 1.0;  ///< linear: eta = scale u; log: eta = exp(scale u);
                         ///< logit: eta = lo + width sigmoid(scale u)
    double lo = 0.0;
    double width = 1.0;
  };

  CoordinateMap() = default;
  explicit CoordinateMap(std::vector<Axis> axes) : axes_(std::move(axes)) {}

  std::size_t size() const { return axes_.size(); }
  const Axis& axis(std::size_t i) const { return axes_[i]; }

  std::vector<double> to_natural(std::span<const double> u) const;
  std::vector<double> to_unit(std::span<const double> eta) const;
  /// log |d eta / d u| summed over axes.
  double log_jacobian(std::span<const double> u) const;
  /// Gradient in u of f(eta(u)) + log_jacobian(u), given grad_eta f.
  std::vector<double> pull_back(std::span<const double> u, std::span<const double> grad_eta) const;

 private:
  std::vector<Axis> axes_;
};

/// Reference-phase change of the reflection coefficients. The model phase of
/// an atom at the centre of the subcarrier, symbol and aperture index ranges is
/// phi = -2 pi m_c df tau + 2 pi k_c Ts f_D + 2 pi (d / lambda) n_c sin(theta);
/// the centred coefficient is b' = b exp(j phi). In (b', tau, f_D, theta) the
/// coefficient is nearly uncorrelated with the continuous parameters. The map
/// has unit Jacobian.
class PhaseCentering {
 public:
  PhaseCentering() = default;  ///< identity
  explicit PhaseCentering(const SystemConfig& cfg);

  bool identity() const { return identity_; }
  double phase(double delay_s, double doppler_hz, double angle_rad) const;
  /// d phi / d(tau, f_D, theta).
  std::array<double, 3> phase_gradient(double angle_rad) const;

  /// Centred flat vector -> model flat vector, and back.
  std::vector<double> to_model(std::span<const double> c) const;
  std::vector<double> to_centred(std::span<const double> eta) const;
  /// Gradient with respect to the centred coordinates from the model
  /// gradient, evaluated at model point `eta`.
  std::vector<double> pull_back(std::span<const double> eta, std::span<const double> grad_eta) const;

 private:
  bool identity_ = true;
  double delay_rate_ = 0.0;
  double doppler_rate_ = 0.0;
  double angle_rate_ = 0.0;
};

/// Interval scaling: bounded coordinates divided by interval width.
CoordinateMap interval_map(const PriorConfig& pc);

/// Curvature scaling around `eta0` for data of noise precision eta0.xi and
/// likelihood weight `weight` = H^gamma / H. Units are the conditional
/// deviations of the tempered posterior in the coordinates of `centring`.
CoordinateMap curvature_map(const ParamState& eta0, const PriorConfig& pc, const CTensor3& tx,
                            const SystemConfig& cfg, double weight, const SamplerConfig& sc,
                            const PhaseCentering& centring = {});

/// Starting state on (power-normalized) data.
ParamState initial_state(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                         const PriorConfig& pc, const SamplerConfig& sc, Rng& rng);

struct ChainDiagnostics {
  std::size_t iterations = 0;
  std::size_t accepted = 0;
  std::size_t out_of_bounds = 0;
  double acceptance_rate = 0.0;
  std::vector<double> trace;  ///< tempered log-posterior of the current state, per step
  double final_log_posterior = 0.0;  ///< full-data log-posterior of the estimate
  double power_scale = 1.0;          ///< observation was divided by this amplitude
};

enum class AcceptPolicy { kMetropolis, kRejectAll };

/// Test and inspection hooks; defaults reproduce the plain chain.
struct ChainControls {
  std::optional<ParamState> initial;  ///< in the observation's units
  AcceptPolicy policy = AcceptPolicy::kMetropolis;
  bool record_samples = false;
};

struct ChainResult {
  ParamState estimate;              ///< mean of the collected states
  ChainDiagnostics diagnostics;
  std::vector<ParamState> samples;  ///< collected states when requested
};

/// One Adam-preconditioned tempered mini-batch Metropolis chain.
ChainResult run_chain(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                      const PriorConfig& pc, const SamplerConfig& sc,
                      const ChainControls& controls = {});

/// sc.chains independent chains with seeds derived from sc.seed; returns the
/// one with the highest full-data log-posterior at its estimate.
ChainResult run_chains(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                       const PriorConfig& pc, const SamplerConfig& sc);

}  // namespace isac
