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

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isac/posterior.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// Information matrix over zeta = [b_re[L], b_im[L], tau[L], f_D[L], theta[L], xi].
struct FimBlock {
  Eigen::MatrixXd matrix;
  std::vector<std::string> labels;
  std::size_t targets = 0;

  static std::size_t dimension(std::size_t l) { return 5 * l + 1; }
  static std::size_t b_re_index(std::size_t, std::size_t i) { return i; }
  static std::size_t b_im_index(std::size_t l, std::size_t i) { return l + i; }
  static std::size_t delay_index(std::size_t l, std::size_t i) { return 2 * l + i; }
  static std::size_t doppler_index(std::size_t l, std::size_t i) { return 3 * l + i; }
  static std::size_t angle_index(std::size_t l, std::size_t i) { return 4 * l + i; }
  static std::size_t xi_index(std::size_t l) { return 5 * l; }

  static std::vector<std::string> make_labels(std::size_t l);
};

using ChannelJacobian = Eigen::Matrix<cplx, Eigen::Dynamic, 5>;

/// Vectorized channel h_r = sum_l b_l w_{r,l} a(theta_l) kron a(theta_l), length N^2.
Eigen::VectorXcd channel_vector(std::span<const Target> targets, std::size_t m, std::size_t k,
                                const SystemConfig& cfg);

/// Columns d h_r / d(b_re, b_im, tau, f_D, theta) for one target, N^2 rows.
ChannelJacobian channel_derivatives(const Target& target, std::size_t m, std::size_t k,
                                    const SystemConfig& cfg);

/// Classical Fisher information of the complex Gaussian observation model.
/// The xi row and column are zero apart from [xi, xi] = M K N / xi^2.
FimBlock classical_fim(std::span<const Target> targets, const CTensor3& tx, double xi,
                       const SystemConfig& cfg);

/// Diagonal prior information. Throws Error(kConfig) unless shape_rho > 1
/// and shape_xi > 2.
FimBlock prior_fim(const PriorConfig& pc, std::size_t l);

struct BoundEntry {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double angle_rad = 0.0;
  double b_re = 0.0;
  double b_im = 0.0;
};

struct BcrbReport {
  std::vector<BoundEntry> per_target;  ///< square-root bounds in native units
  double xi = 0.0;                     ///< square-root bound on xi
  double trace = 0.0;                  ///< trace of the inverse information
  std::size_t draws = 0;
  Eigen::MatrixXd inverse;
};

/// Inverts `information` and reports square-root diagonal entries.
/// Throws Error(kNumeric) with the condition number when it is not
/// numerically positive definite.
BcrbReport bound_from_information(const Eigen::MatrixXd& information, std::size_t l,
                                  const SystemConfig& cfg, std::size_t draws);

/// Ordered running mean of classical information matrices.
class FimAverager {
 public:
  explicit FimAverager(std::size_t l) : sum_(Eigen::MatrixXd::Zero(FimBlock::dimension(l), FimBlock::dimension(l))), l_(l) {}
  void add(const FimBlock& fim);
  std::size_t count() const { return count_; }
  Eigen::MatrixXd mean() const;
  std::size_t targets() const { return l_; }

 private:
  Eigen::MatrixXd sum_;
  std::size_t l_;
  std::size_t count_ = 0;
};

/// One prior draw of L targets and xi: angles, delays and Dopplers from their
/// truncated Gaussians, rho from its Gamma prior and b | rho ~ CN(0, rho).
struct PriorDraw {
  std::vector<Target> targets;
  double xi = 1.0;
};
PriorDraw draw_from_prior(const PriorConfig& pc, std::size_t l, Rng& rng);

/// Monte Carlo Bayesian bound: average classical FIM over S prior draws,
/// add the prior information, invert.
BcrbReport bcrb_monte_carlo(const PriorConfig& pc, const CTensor3& tx, const SystemConfig& cfg,
                            std::size_t draws, Rng& rng, std::size_t l = 1);

/// Same bound for caller-supplied draws.
BcrbReport bcrb_from_draws(std::span<const PriorDraw> draws, const PriorConfig& pc,
                           const CTensor3& tx, const SystemConfig& cfg);

}  // namespace isac
