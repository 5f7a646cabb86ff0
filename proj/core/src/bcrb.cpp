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

#include "isac/bcrb.hpp"

#include <cmath>
#include <sstream>

#include "isac/errors.hpp"

namespace isac {

std::vector<std::string> FimBlock::make_labels(std::size_t l) {
  std::vector<std::string> labels(dimension(l));
  const char* names[] = {"b_re", "b_im", "delay", "doppler", "angle"};
  for (std::size_t p = 0; p < 5; ++p) {
    for (std::size_t i = 0; i < l; ++i) {
      labels[p * l + i] = std::string(names[p]) + "[" + std::to_string(i) + "]";
    }
  }
  labels[xi_index(l)] = "xi";
  return labels;
}

namespace {

cplx phase_factor(const Target& t, std::size_t m, std::size_t k, const SystemConfig& cfg) {
  return std::polar(1.0, -kTwoPi * static_cast<double>(m) * cfg.subcarrier_hz * t.delay_s +
                             kTwoPi * t.doppler_hz * static_cast<double>(k) * cfg.symbol_period_s());
}

Eigen::VectorXcd kron_steer(const std::vector<cplx>& a) {
  const std::size_t N = a.size();
  Eigen::VectorXcd v(static_cast<Eigen::Index>(N * N));
  for (std::size_t n1 = 0; n1 < N; ++n1) {
    for (std::size_t n2 = 0; n2 < N; ++n2) v(static_cast<Eigen::Index>(n1 * N + n2)) = a[n1] * a[n2];
  }
  return v;
}

}  // namespace

Eigen::VectorXcd channel_vector(std::span<const Target> targets, std::size_t m, std::size_t k,
                                const SystemConfig& cfg) {
  const std::size_t N = cfg.n_antennas;
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N * N));
  for (const auto& t : targets) {
    h += t.refl * phase_factor(t, m, k, cfg) * kron_steer(steering_vector(t.angle_rad, cfg));
  }
  return h;
}

ChannelJacobian channel_derivatives(const Target& t, std::size_t m, std::size_t k,
                                    const SystemConfig& cfg) {
  const std::size_t N = cfg.n_antennas;
  const cplx j{0.0, 1.0};
  const Eigen::VectorXcd v = phase_factor(t, m, k, cfg) * kron_steer(steering_vector(t.angle_rad, cfg));
  const double kappa = kTwoPi * SystemConfig::kSpacingRatio * std::cos(t.angle_rad);
  ChannelJacobian d(static_cast<Eigen::Index>(N * N), 5);
  d.col(0) = v;
  d.col(1) = j * v;
  d.col(2) = -j * kTwoPi * static_cast<double>(m) * cfg.subcarrier_hz * t.refl * v;
  d.col(3) = j * kTwoPi * static_cast<double>(k) * cfg.symbol_period_s() * t.refl * v;
  for (std::size_t n1 = 0; n1 < N; ++n1) {
    for (std::size_t n2 = 0; n2 < N; ++n2) {
      const auto i = static_cast<Eigen::Index>(n1 * N + n2);
      d(i, 4) = t.refl * j * kappa * static_cast<double>(n1 + n2) * v(i);
    }
  }
  return d;
}

FimBlock classical_fim(std::span<const Target> targets, const CTensor3& tx, double xi,
                       const SystemConfig& cfg) {
  if (!(xi > 0.0)) throw_input("classical_fim: xi must be positive");
  if (!tx.same_shape(cfg)) throw_input("classical_fim: transmit tensor does not match configuration");
  const std::size_t L = targets.size(), M = cfg.n_subcarriers, K = cfg.n_symbols,
                    N = cfg.n_antennas;
  const std::size_t P = 5 * L;
  const cplx j{0.0, 1.0};

  std::vector<std::vector<cplx>> steer(L);
  std::vector<double> kappa(L);
  for (std::size_t l = 0; l < L; ++l) {
    steer[l] = steering_vector(targets[l].angle_rad, cfg);
    kappa[l] = kTwoPi * SystemConfig::kSpacingRatio * std::cos(targets[l].angle_rad);
  }

  // J_r holds d mu_r / d zeta (N x 5L) for resource r; I += 2 xi Re(J^H J).
  Eigen::MatrixXcd J(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(P));
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t k = 0; k < K; ++k) {
      const cplx* x = tx.resource(m, k);
      for (std::size_t l = 0; l < L; ++l) {
        const Target& t = targets[l];
        const auto& a = steer[l];
        cplx s{0.0, 0.0}, s_idx{0.0, 0.0};
        for (std::size_t n = 0; n < N; ++n) {
          s += a[n] * x[n];
          s_idx += static_cast<double>(n) * a[n] * x[n];
        }
        const cplx w = phase_factor(t, m, k, cfg);
        const cplx c_tau = -j * kTwoPi * static_cast<double>(m) * cfg.subcarrier_hz * t.refl;
        const cplx c_dop = j * kTwoPi * static_cast<double>(k) * cfg.symbol_period_s() * t.refl;
        for (std::size_t n = 0; n < N; ++n) {
          const auto row = static_cast<Eigen::Index>(n);
          const cplx base = w * s * a[n];
          J(row, static_cast<Eigen::Index>(FimBlock::b_re_index(L, l))) = base;
          J(row, static_cast<Eigen::Index>(FimBlock::b_im_index(L, l))) = j * base;
          J(row, static_cast<Eigen::Index>(FimBlock::delay_index(L, l))) = c_tau * base;
          J(row, static_cast<Eigen::Index>(FimBlock::doppler_index(L, l))) = c_dop * base;
          J(row, static_cast<Eigen::Index>(FimBlock::angle_index(L, l))) =
              t.refl * w * j * kappa[l] * a[n] * (static_cast<double>(n) * s + s_idx);
        }
      }
      info.noalias() += (J.adjoint() * J).real();
    }
  }

  FimBlock fim;
  fim.targets = L;
  fim.labels = FimBlock::make_labels(L);
  const auto D = static_cast<Eigen::Index>(FimBlock::dimension(L));
  fim.matrix = Eigen::MatrixXd::Zero(D, D);
  fim.matrix.topLeftCorner(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P)) = 2.0 * xi * info;
  fim.matrix(D - 1, D - 1) = static_cast<double>(M * K * N) / (xi * xi);
  return fim;
}

FimBlock prior_fim(const PriorConfig& pc, std::size_t l) {
  if (!(pc.rho.shape > 1.0)) throw_config("prior_fim: rho shape must exceed 1");
  if (!(pc.xi.shape > 2.0)) throw_config("prior_fim: xi shape must exceed 2");
  FimBlock fim;
  fim.targets = l;
  fim.labels = FimBlock::make_labels(l);
  const auto D = static_cast<Eigen::Index>(FimBlock::dimension(l));
  fim.matrix = Eigen::MatrixXd::Zero(D, D);
  const double b_info = 2.0 * pc.rho.rate / (pc.rho.shape - 1.0);
  for (std::size_t i = 0; i < l; ++i) {
    fim.matrix(static_cast<Eigen::Index>(FimBlock::b_re_index(l, i)), static_cast<Eigen::Index>(FimBlock::b_re_index(l, i))) = b_info;
    fim.matrix(static_cast<Eigen::Index>(FimBlock::b_im_index(l, i)), static_cast<Eigen::Index>(FimBlock::b_im_index(l, i))) = b_info;
    const auto di = static_cast<Eigen::Index>(FimBlock::delay_index(l, i));
    const auto fi = static_cast<Eigen::Index>(FimBlock::doppler_index(l, i));
    const auto ai = static_cast<Eigen::Index>(FimBlock::angle_index(l, i));
    fim.matrix(di, di) = 1.0 / (pc.delay.sd * pc.delay.sd);
    fim.matrix(fi, fi) = 1.0 / (pc.doppler.sd * pc.doppler.sd);
    fim.matrix(ai, ai) = 1.0 / (pc.angle.sd * pc.angle.sd);
  }
  fim.matrix(D - 1, D - 1) = pc.xi.rate * pc.xi.rate / (pc.xi.shape - 2.0);
  return fim;
}

BcrbReport bound_from_information(const Eigen::MatrixXd& information, std::size_t l,
                                  const SystemConfig& cfg, std::size_t draws) {
  const auto D = static_cast<Eigen::Index>(FimBlock::dimension(l));
  if (information.rows() != D || information.cols() != D) {
    throw_input("bound_from_information: matrix does not match the target count");
  }
  const Eigen::MatrixXd sym = 0.5 * (information + information.transpose());
  // Symmetric diagonal equilibration keeps the mixed-unit matrix well scaled.
  Eigen::VectorXd scale = sym.diagonal().cwiseAbs().cwiseSqrt();
  for (Eigen::Index i = 0; i < D; ++i) {
    if (!(scale(i) > 0.0)) scale(i) = 1.0;
  }
  const Eigen::MatrixXd eq = scale.cwiseInverse().asDiagonal() * sym * scale.cwiseInverse().asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(eq);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-13 * hi) || !std::isfinite(lo)) {
    std::ostringstream os;
    os << "information matrix is not positive definite (condition number "
       << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) << ")";
    throw_numeric(os.str());
  }
  const Eigen::MatrixXd eq_inv =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  BcrbReport rep;
  rep.draws = draws;
  rep.inverse = scale.cwiseInverse().asDiagonal() * eq_inv * scale.cwiseInverse().asDiagonal();
  rep.trace = rep.inverse.trace();
  const double lambda = cfg.wavelength_m();
  auto sd = [&](std::size_t i) {
    return std::sqrt(std::max(0.0, rep.inverse(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
  };
  for (std::size_t i = 0; i < l; ++i) {
    BoundEntry e;
    e.b_re = sd(FimBlock::b_re_index(l, i));
    e.b_im = sd(FimBlock::b_im_index(l, i));
    e.range_m = 0.5 * kSpeedOfLight * sd(FimBlock::delay_index(l, i));
    e.velocity_mps = 0.5 * lambda * sd(FimBlock::doppler_index(l, i));
    e.angle_rad = sd(FimBlock::angle_index(l, i));
    rep.per_target.push_back(e);
  }
  rep.xi = sd(FimBlock::xi_index(l));
  return rep;
}

void FimAverager::add(const FimBlock& fim) {
  if (fim.targets != l_) throw_input("FimAverager: target count mismatch");
  sum_ += fim.matrix;
  ++count_;
}

Eigen::MatrixXd FimAverager::mean() const {
  if (count_ == 0) throw_input("FimAverager: no information matrices added");
  return sum_ / static_cast<double>(count_);
}

PriorDraw draw_from_prior(const PriorConfig& pc, std::size_t l, Rng& rng) {
  PriorDraw d;
  d.targets.resize(l);
  for (auto& t : d.targets) {
    t.delay_s = pc.delay.sample(rng);
    t.doppler_hz = pc.doppler.sample(rng);
    t.angle_rad = pc.angle.sample(rng);
    const double rho = pc.rho.sample(rng);
    t.refl = complex_normal(rng, rho);
  }
  d.xi = pc.xi.sample(rng);
  return d;
}

BcrbReport bcrb_from_draws(std::span<const PriorDraw> draws, const PriorConfig& pc,
                           const CTensor3& tx, const SystemConfig& cfg) {
  if (draws.empty()) throw_input("bcrb: at least one prior draw is required");
  const std::size_t l = draws.front().targets.size();
  FimAverager avg(l);
  for (const auto& d : draws) avg.add(classical_fim(d.targets, tx, d.xi, cfg));
  return bound_from_information(avg.mean() + prior_fim(pc, l).matrix, l, cfg, draws.size());
}

BcrbReport bcrb_monte_carlo(const PriorConfig& pc, const CTensor3& tx, const SystemConfig& cfg,
                            std::size_t draws, Rng& rng, std::size_t l) {
  if (draws < 1) throw_input("bcrb_monte_carlo: draw count must be >= 1");
  pc.validate();
  std::vector<PriorDraw> d;
  d.reserve(draws);
  for (std::size_t s = 0; s < draws; ++s) d.push_back(draw_from_prior(pc, l, rng));
  return bcrb_from_draws(d, pc, tx, cfg);
}

}  // namespace isac
