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

#include "isac/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "isac/errors.hpp"

namespace isac {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

TruncatedGaussian TruncatedGaussian::centered(Interval support) {
  return TruncatedGaussian{support, support.mid(), 0.5 * support.width()};
}

double TruncatedGaussian::log_normalizer() const {
  const double alpha = (support.lo - mean) / sd;
  const double beta = (support.hi - mean) / sd;
  const double z = std::sqrt(2.0 * std::numbers::pi) * (std_normal_cdf(beta) - std_normal_cdf(alpha));
  return std::log(sd) + std::log(z);
}

double TruncatedGaussian::log_density(double x) const {
  if (!support.contains(x)) return kOutsideSupport;
  const double u = (x - mean) / sd;
  return -0.5 * u * u - log_normalizer();
}

double TruncatedGaussian::sample(Rng& rng) const {
  std::normal_distribution<double> normal(mean, sd);
  for (int i = 0; i < 10000; ++i) {
    const double x = normal(rng);
    if (support.interior(x)) return x;
  }
  // Only reachable for supports far out in a tail.
  std::uniform_real_distribution<double> uniform(support.lo, support.hi);
  return uniform(rng);
}

double GammaPrior::log_density(double x) const {
  if (!(x > 0.0)) return kOutsideSupport;
  return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape);
}

double GammaPrior::sample(Rng& rng) const {
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  return gamma(rng);
}

PriorConfig PriorConfig::from_bounds(std::size_t q, Interval delay_s, Interval doppler_hz,
                                     Interval angle_rad) {
  PriorConfig pc;
  pc.q = q;
  pc.delay = TruncatedGaussian::centered(delay_s);
  pc.doppler = TruncatedGaussian::centered(doppler_hz);
  pc.angle = TruncatedGaussian::centered(angle_rad);
  return pc;
}

void PriorConfig::validate() const {
  if (q < 1) throw_config("prior.q must be >= 1");
  auto check_tg = [](const TruncatedGaussian& tg, const char* name) {
    if (!(tg.support.lo < tg.support.hi)) {
      throw_config(std::string("prior.") + name + ": lower bound must be below upper bound");
    }
    if (!(tg.sd > 0.0)) throw_config(std::string("prior.") + name + ": deviation must be positive");
  };
  check_tg(delay, "delay");
  check_tg(doppler, "doppler");
  check_tg(angle, "angle");
  if (!(angle.support.lo > -std::numbers::pi / 2 && angle.support.hi < std::numbers::pi / 2)) {
    throw_config("prior.angle: support must lie inside (-90, 90) degrees");
  }
  if (!(rho.shape > 1.0) || !(rho.rate > 0.0)) {
    throw_config("prior: rho Gamma prior needs shape > 1 and rate > 0");
  }
  if (!(xi.shape > 2.0) || !(xi.rate > 0.0)) {
    throw_config("prior: xi Gamma prior needs shape > 2 and rate > 0");
  }
  if (!(rho_bounds.lo > 0.0 && rho_bounds.lo < rho_bounds.hi)) {
    throw_config("prior: rho bounds must satisfy 0 < lo < hi");
  }
  if (!(xi_bounds.lo > 0.0 && xi_bounds.lo < xi_bounds.hi)) {
    throw_config("prior: xi bounds must satisfy 0 < lo < hi");
  }
}

std::vector<cplx> ParamState::coefficients() const {
  std::vector<cplx> out(q());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = b(i);
  return out;
}

std::vector<double> ParamState::flatten() const {
  std::vector<double> v;
  v.reserve(dim());
  for (const auto* block : {&delay, &doppler, &angle, &b_re, &b_im, &rho}) {
    v.insert(v.end(), block->begin(), block->end());
  }
  v.push_back(xi);
  return v;
}

ParamState ParamState::unflatten(std::span<const double> v, std::size_t q) {
  if (v.size() != dimension(q)) {
    throw_input("ParamState::unflatten: expected " + std::to_string(dimension(q)) +
                " values, got " + std::to_string(v.size()));
  }
  ParamState s(q);
  std::size_t off = 0;
  for (auto* block : {&s.delay, &s.doppler, &s.angle, &s.b_re, &s.b_im, &s.rho}) {
    std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(off), q, block->begin());
    off += q;
  }
  s.xi = v[off];
  return s;
}

bool within_support(const ParamState& eta, const PriorConfig& pc) {
  for (std::size_t i = 0; i < eta.q(); ++i) {
    if (!pc.delay.support.contains(eta.delay[i]) || !pc.doppler.support.contains(eta.doppler[i]) ||
        !pc.angle.support.contains(eta.angle[i]) || !pc.rho_bounds.contains(eta.rho[i]) ||
        !std::isfinite(eta.b_re[i]) || !std::isfinite(eta.b_im[i])) {
      return false;
    }
  }
  return pc.xi_bounds.contains(eta.xi);
}

bool strictly_inside(const ParamState& eta, const PriorConfig& pc) {
  for (std::size_t i = 0; i < eta.q(); ++i) {
    if (!pc.delay.support.interior(eta.delay[i]) || !pc.doppler.support.interior(eta.doppler[i]) ||
        !pc.angle.support.interior(eta.angle[i]) || !pc.rho_bounds.interior(eta.rho[i]) ||
        !std::isfinite(eta.b_re[i]) || !std::isfinite(eta.b_im[i])) {
      return false;
    }
  }
  return pc.xi_bounds.interior(eta.xi);
}

MiniBatch MiniBatch::full(std::span<const cplx> y) {
  MiniBatch mb;
  mb.total = y.size();
  mb.indices.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) mb.indices[i] = i;
  mb.values.assign(y.begin(), y.end());
  return mb;
}

MiniBatch MiniBatch::from_indices(std::span<const cplx> y, std::vector<std::size_t> indices) {
  MiniBatch mb;
  mb.total = y.size();
  mb.indices = std::move(indices);
  mb.values.reserve(mb.indices.size());
  for (auto i : mb.indices) {
    if (i >= y.size()) throw_input("MiniBatch: index out of range");
    mb.values.push_back(y[i]);
  }
  return mb;
}

void MiniBatch::validate() const {
  if (values.size() != indices.size()) throw_input("MiniBatch: values and indices differ in length");
  std::vector<std::size_t> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw_input("MiniBatch: duplicate index");
  }
  if (!sorted.empty() && sorted.back() >= total) throw_input("MiniBatch: index out of range");
}

namespace {

// Per-slot quantities that do not depend on the data index.
struct SlotCache {
  std::vector<cplx> steer;        // Q x N, row-major
  std::vector<cplx> coef;
  std::vector<cplx> delay_tab;    // Q x M, exp(-j 2 pi m df tau)
  std::vector<cplx> doppler_tab;  // Q x K, exp(j 2 pi k f_D T_s)
  std::vector<double> angle_gain;  // 2 pi (d/lambda) cos theta
};

// exp(j step i) for i = 0..n-1 by recurrence, re-anchored every 16 entries
// to keep the rounding drift at the 1e-15 level.
void fill_phasors(double step, std::size_t n, cplx* out) {
  const cplx rot = std::polar(1.0, step);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (i % 16 == 0) ? std::polar(1.0, step * static_cast<double>(i)) : out[i - 1] * rot;
  }
}

SlotCache make_cache(const ParamState& eta, const SystemConfig& cfg) {
  const std::size_t Q = eta.q(), N = cfg.n_antennas, M = cfg.n_subcarriers, K = cfg.n_symbols;
  SlotCache c;
  c.steer.resize(Q * N);
  c.coef = eta.coefficients();
  c.delay_tab.resize(Q * M);
  c.doppler_tab.resize(Q * K);
  c.angle_gain.resize(Q);
  const double kappa = kTwoPi * SystemConfig::kSpacingRatio;
  for (std::size_t q = 0; q < Q; ++q) {
    fill_phasors(kappa * std::sin(eta.angle[q]), N, c.steer.data() + q * N);
    fill_phasors(-kTwoPi * cfg.subcarrier_hz * eta.delay[q], M, c.delay_tab.data() + q * M);
    fill_phasors(kTwoPi * eta.doppler[q] * cfg.symbol_period_s(), K, c.doppler_tab.data() + q * K);
    c.angle_gain[q] = kappa * std::cos(eta.angle[q]);
  }
  return c;
}

// Returns weight * sum_i log p(y_i | eta) over the given positions and, when
// grad is non-null, adds weight * d/d eta of the same sum into grad.
double accumulate_likelihood(const ParamState& eta, std::span<const std::size_t> indices,
                             std::span<const cplx> values, const CTensor3& tx,
                             const SystemConfig& cfg, double weight, double* grad) {
  const std::size_t Q = eta.q(), N = cfg.n_antennas, K = cfg.n_symbols, M = cfg.n_subcarriers;
  const SlotCache c = make_cache(eta, cfg);
  const double xi = eta.xi;
  const double log_norm = std::log(xi / std::numbers::pi);
  const double two_pi_df = kTwoPi * cfg.subcarrier_hz;
  const double two_pi_ts = kTwoPi * cfg.symbol_period_s();

  std::vector<cplx> phi(Q), psi(Q);
  double sum_sq = 0.0;
  double g_xi = 0.0;
  double* g_tau = grad ? grad + ParamState::delay_offset(Q) : nullptr;
  double* g_f = grad ? grad + ParamState::doppler_offset(Q) : nullptr;
  double* g_th = grad ? grad + ParamState::angle_offset(Q) : nullptr;
  double* g_br = grad ? grad + ParamState::bre_offset(Q) : nullptr;
  double* g_bi = grad ? grad + ParamState::bim_offset(Q) : nullptr;
  const double scale = 2.0 * xi * weight;

  for (std::size_t j = 0; j < indices.size(); ++j) {
    const std::size_t idx = indices[j];
    const std::size_t n = idx % N;
    const std::size_t k = (idx / N) % K;
    const std::size_t m = idx / (N * K);
    const cplx* x = tx.resource(m, k);
    const double dm = static_cast<double>(m), dk = static_cast<double>(k);
    const double dn = static_cast<double>(n);

    cplx mu{0.0, 0.0};
    for (std::size_t q = 0; q < Q; ++q) {
      const cplx* a = c.steer.data() + q * N;
      cplx s{0.0, 0.0};
      cplx s_idx{0.0, 0.0};
      if (grad) {
        for (std::size_t p = 0; p < N; ++p) {
          const cplx ax = a[p] * x[p];
          s += ax;
          s_idx += static_cast<double>(p) * ax;
        }
      } else {
        for (std::size_t p = 0; p < N; ++p) s += a[p] * x[p];
      }
      const cplx e = c.delay_tab[q * M + m] * c.doppler_tab[q * K + k];
      const cplx ea = e * a[n];
      phi[q] = ea * s;
      if (grad) psi[q] = ea * s_idx;
      mu += c.coef[q] * phi[q];
    }
    const cplx r = values[j] - mu;
    const double r2 = std::norm(r);
    sum_sq += r2;
    if (grad) {
      const cplx rc = std::conj(r);
      for (std::size_t q = 0; q < Q; ++q) {
        const cplx cphi = rc * phi[q];
        const cplx cb = cphi * c.coef[q];
        g_br[q] += scale * cphi.real();
        g_bi[q] -= scale * cphi.imag();
        g_tau[q] += scale * two_pi_df * dm * cb.imag();
        g_f[q] -= scale * two_pi_ts * dk * cb.imag();
        const cplx ct = rc * c.coef[q] * (dn * phi[q] + psi[q]);
        g_th[q] -= scale * c.angle_gain[q] * ct.imag();
      }
      g_xi += weight * (1.0 / xi - r2);
    }
  }
  if (grad) grad[ParamState::xi_offset(Q)] += g_xi;
  return weight * (static_cast<double>(indices.size()) * log_norm - xi * sum_sq);
}

void add_prior_gradient(const ParamState& eta, const PriorConfig& pc, double* grad) {
  const std::size_t Q = eta.q();
  for (std::size_t q = 0; q < Q; ++q) {
    grad[ParamState::delay_offset(Q) + q] += pc.delay.grad(eta.delay[q]);
    grad[ParamState::doppler_offset(Q) + q] += pc.doppler.grad(eta.doppler[q]);
    grad[ParamState::angle_offset(Q) + q] += pc.angle.grad(eta.angle[q]);
    const double rho = eta.rho[q];
    grad[ParamState::bre_offset(Q) + q] += -2.0 * eta.b_re[q] / rho;
    grad[ParamState::bim_offset(Q) + q] += -2.0 * eta.b_im[q] / rho;
    const double b2 = eta.b_re[q] * eta.b_re[q] + eta.b_im[q] * eta.b_im[q];
    grad[ParamState::rho_offset(Q) + q] += -1.0 / rho + b2 / (rho * rho) + pc.rho.grad(rho);
  }
  grad[ParamState::xi_offset(Q)] += pc.xi.grad(eta.xi);
}

void require_shapes(const ParamState& eta, const CTensor3& tx, const SystemConfig& cfg) {
  if (!tx.same_shape(cfg)) throw_input("posterior: transmit tensor does not match configuration");
  const std::size_t q = eta.q();
  if (eta.doppler.size() != q || eta.angle.size() != q || eta.b_re.size() != q ||
      eta.b_im.size() != q || eta.rho.size() != q) {
    throw_input("posterior: parameter blocks have inconsistent lengths");
  }
}

}  // namespace

double log_likelihood(const ParamState& eta, std::span<const cplx> y, const CTensor3& tx,
                      const SystemConfig& cfg) {
  require_shapes(eta, tx, cfg);
  if (y.size() != cfg.data_size()) throw_input("log_likelihood: observation length mismatch");
  const MiniBatch all = MiniBatch::full(y);
  return accumulate_likelihood(eta, all.indices, all.values, tx, cfg, 1.0, nullptr);
}

double log_prior(const ParamState& eta, const PriorConfig& pc) {
  if (!within_support(eta, pc)) return kOutsideSupport;
  double lp = pc.xi.log_density(eta.xi);
  for (std::size_t q = 0; q < eta.q(); ++q) {
    const double rho = eta.rho[q];
    const double b2 = eta.b_re[q] * eta.b_re[q] + eta.b_im[q] * eta.b_im[q];
    lp += -std::log(std::numbers::pi * rho) - b2 / rho;
    lp += pc.rho.log_density(rho);
    lp += pc.delay.log_density(eta.delay[q]);
    lp += pc.doppler.log_density(eta.doppler[q]);
    lp += pc.angle.log_density(eta.angle[q]);
  }
  return lp;
}

double gamma_exponent(std::size_t batch, std::size_t total, double upsilon) {
  if (batch == 0) throw_input("gamma_exponent: batch size must be >= 1");
  if (total < 2) throw_input("gamma_exponent: data size must be >= 2");
  if (batch > total) throw_input("gamma_exponent: batch larger than data");
  return upsilon * std::log(static_cast<double>(batch)) / std::log(static_cast<double>(total));
}

TemperedValue evaluate_tempered(const ParamState& eta, const MiniBatch& batch,
                                const PriorConfig& pc, const CTensor3& tx,
                                const SystemConfig& cfg, double gamma, bool with_grad) {
  require_shapes(eta, tx, cfg);
  TemperedValue out;
  const double lp = log_prior(eta, pc);
  if (outside_support(lp)) {
    if (with_grad) throw_input("grad_tempered: state outside the prior support");
    out.value = kOutsideSupport;
    return out;
  }
  if (with_grad && !strictly_inside(eta, pc)) {
    throw_input("grad_tempered: state lies on a prior bound");
  }
  const double weight =
      std::pow(static_cast<double>(batch.total), gamma) / static_cast<double>(batch.size());
  if (with_grad) out.grad.assign(eta.dim(), 0.0);
  const double ll = accumulate_likelihood(eta, batch.indices, batch.values, tx, cfg, weight,
                                          with_grad ? out.grad.data() : nullptr);
  if (with_grad) add_prior_gradient(eta, pc, out.grad.data());
  out.value = ll + lp;
  return out;
}

double tempered_logpost(const ParamState& eta, const MiniBatch& batch, const PriorConfig& pc,
                        const CTensor3& tx, const SystemConfig& cfg, double gamma) {
  return evaluate_tempered(eta, batch, pc, tx, cfg, gamma, false).value;
}

std::vector<double> grad_tempered(const ParamState& eta, const MiniBatch& batch,
                                  const PriorConfig& pc, const CTensor3& tx,
                                  const SystemConfig& cfg, double gamma) {
  return evaluate_tempered(eta, batch, pc, tx, cfg, gamma, true).grad;
}

}  // namespace isac
