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

#include "isac/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "isac/baselines.hpp"
#include "isac/bcrb.hpp"
#include "isac/errors.hpp"

namespace isac {

std::string_view init_mode_name(InitMode m) {
  return m == InitMode::kPrior ? "prior" : "matched_filter";
}

std::string_view scaling_name(Scaling s) {
  return s == Scaling::kInterval ? "interval" : "curvature";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "prior") return InitMode::kPrior;
  if (name == "matched_filter") return InitMode::kMatchedFilter;
  throw_config("sampler.init: unknown mode '" + std::string(name) +
               "' (expected prior or matched_filter)");
}

Scaling parse_scaling(std::string_view name) {
  if (name == "interval") return Scaling::kInterval;
  if (name == "curvature") return Scaling::kCurvature;
  throw_config("sampler.scaling: unknown mode '" + std::string(name) +
               "' (expected interval or curvature)");
}

void SamplerConfig::validate(std::size_t data_size) const {
  if (batch_size < 1) throw_config("sampler.batch_size must be >= 1");
  if (batch_size > data_size) {
    throw_config("sampler.batch_size " + std::to_string(batch_size) + " exceeds data size " +
                 std::to_string(data_size));
  }
  if (!(step0 > 0.0)) throw_config("sampler.step0 must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw_config("sampler.beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw_config("sampler.beta2 must lie in [0, 1)");
  if (!(eps_stab > 0.0)) throw_config("sampler.eps_stab must be positive");
  if (n_samples < 1) throw_config("sampler.n_samples must be >= 1");
  if (!(upsilon > 0.0 && upsilon <= 1.0)) throw_config("sampler.upsilon must lie in (0, 1]");
  if (chains < 1) throw_config("sampler.chains must be >= 1");
  if (!(curvature_gain > 0.0)) throw_config("sampler.curvature_gain must be positive");
  if (!(max_unit_cells > 0.0)) throw_config("sampler.max_unit_cells must be positive");
  if (!(init_points_per_cell > 0.0)) throw_config("sampler.init_points_per_cell must be positive");
}

double learning_rate(std::size_t t, double step0) {
  if (t == 0) return step0;
  return step0 / (1.0 + std::pow(static_cast<double>(t), 0.005));
}

AdamStep adam_update(AdamState& adam, std::span<const double> grad, const SamplerConfig& sc,
                     double step) {
  const std::size_t F = grad.size();
  if (adam.w.size() != F || adam.v.size() != F) throw_input("adam_update: dimension mismatch");
  adam.t += 1;
  const double c1 = 1.0 - std::pow(sc.beta1, static_cast<double>(adam.t));
  const double c2 = 1.0 - std::pow(sc.beta2, static_cast<double>(adam.t));
  AdamStep out;
  out.drift.resize(F);
  out.noise_var.resize(F);
  for (std::size_t i = 0; i < F; ++i) {
    adam.w[i] = sc.beta1 * adam.w[i] + (1.0 - sc.beta1) * grad[i];
    adam.v[i] = sc.beta2 * adam.v[i] + (1.0 - sc.beta2) * grad[i] * grad[i];
    const double w_hat = adam.w[i] / c1;
    const double v_hat = adam.v[i] / c2;
    const double denom = std::sqrt(v_hat) + sc.eps_stab;
    out.drift[i] = w_hat / denom;
    out.noise_var[i] = 2.0 * step / denom;
  }
  return out;
}

std::vector<double> propose(std::span<const double> eta, const AdamStep& adam, double step,
                            Rng* rng) {
  std::vector<double> out(eta.begin(), eta.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += step * adam.drift[i];
    if (rng) out[i] += std::sqrt(adam.noise_var[i]) * normal(*rng);
  }
  return out;
}

bool mh_accept(double log_new, double log_old, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  if (outside_support(log_new) || std::isnan(log_new)) return false;
  const double diff = log_new - log_old;
  if (diff >= 0.0) return true;
  return std::log(u) < diff;
}

BatchSampler::BatchSampler(std::size_t total, std::size_t batch) : perm_(total), batch_(batch) {
  if (batch > total) throw_input("BatchSampler: batch larger than data");
  for (std::size_t i = 0; i < total; ++i) perm_[i] = i;
}

std::span<const std::size_t> BatchSampler::draw(Rng& rng) {
  // Partial Fisher-Yates: the leading batch_ entries are a uniform draw
  // without replacement whatever order the array was left in.
  const std::size_t n = perm_.size();
  for (std::size_t i = 0; i < batch_; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(perm_[i], perm_[pick(rng)]);
  }
  return std::span<const std::size_t>(perm_.data(), batch_);
}

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::vector<double> CoordinateMap::to_natural(std::span<const double> u) const {
  std::vector<double> eta(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Axis& a = axes_[i];
    switch (a.kind) {
      case Kind::kLinear: eta[i] = a.scale * u[i]; break;
      case Kind::kLog: eta[i] = std::exp(a.scale * u[i]); break;
      case Kind::kLogit: eta[i] = a.lo + a.width * sigmoid(a.scale * u[i]); break;
    }
  }
  return eta;
}

std::vector<double> CoordinateMap::to_unit(std::span<const double> eta) const {
  std::vector<double> u(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const Axis& a = axes_[i];
    switch (a.kind) {
      case Kind::kLinear: u[i] = eta[i] / a.scale; break;
      case Kind::kLog: u[i] = std::log(eta[i]) / a.scale; break;
      case Kind::kLogit: {
        const double p = (eta[i] - a.lo) / a.width;
        u[i] = std::log(p / (1.0 - p)) / a.scale;
        break;
      }
    }
  }
  return u;
}

double CoordinateMap::log_jacobian(std::span<const double> u) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Axis& a = axes_[i];
    switch (a.kind) {
      case Kind::kLinear: acc += std::log(a.scale); break;
      case Kind::kLog: acc += std::log(a.scale) + a.scale * u[i]; break;
      case Kind::kLogit: {
        const double z = a.scale * u[i];
        acc += std::log(a.width * a.scale) - softplus(-z) - softplus(z);
        break;
      }
    }
  }
  return acc;
}

std::vector<double> CoordinateMap::pull_back(std::span<const double> u,
                                             std::span<const double> grad_eta) const {
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Axis& a = axes_[i];
    switch (a.kind) {
      case Kind::kLinear: g[i] = a.scale * grad_eta[i]; break;
      case Kind::kLog: {
        const double eta = std::exp(a.scale * u[i]);
        g[i] = a.scale * eta * grad_eta[i] + a.scale;
        break;
      }
      case Kind::kLogit: {
        const double p = sigmoid(a.scale * u[i]);
        g[i] = a.width * a.scale * p * (1.0 - p) * grad_eta[i] + a.scale * (1.0 - 2.0 * p);
        break;
      }
    }
  }
  return g;
}

PhaseCentering::PhaseCentering(const SystemConfig& cfg)
    : identity_(false),
      delay_rate_(-kTwoPi * 0.5 * static_cast<double>(cfg.n_subcarriers - 1) * cfg.subcarrier_hz),
      doppler_rate_(kTwoPi * 0.5 * static_cast<double>(cfg.n_symbols - 1) * cfg.symbol_period_s()),
      // Receive and transmit steering each contribute half the aperture.
      angle_rate_(kTwoPi * SystemConfig::kSpacingRatio * static_cast<double>(cfg.n_antennas - 1)) {}

double PhaseCentering::phase(double delay_s, double doppler_hz, double angle_rad) const {
  return delay_rate_ * delay_s + doppler_rate_ * doppler_hz + angle_rate_ * std::sin(angle_rad);
}

std::array<double, 3> PhaseCentering::phase_gradient(double angle_rad) const {
  return {delay_rate_, doppler_rate_, angle_rate_ * std::cos(angle_rad)};
}

namespace {

// Rotates every coefficient by exp(j sign phi_q).
std::vector<double> rotate_coefficients(const PhaseCentering& pcn, std::span<const double> v,
                                        double sign) {
  std::vector<double> out(v.begin(), v.end());
  if (pcn.identity()) return out;
  const std::size_t Q = (v.size() - 1) / 6;
  for (std::size_t q = 0; q < Q; ++q) {
    const double phi = pcn.phase(v[ParamState::delay_offset(Q) + q], v[ParamState::doppler_offset(Q) + q],
                                 v[ParamState::angle_offset(Q) + q]);
    const cplx b{v[ParamState::bre_offset(Q) + q], v[ParamState::bim_offset(Q) + q]};
    const cplx r = b * std::polar(1.0, sign * phi);
    out[ParamState::bre_offset(Q) + q] = r.real();
    out[ParamState::bim_offset(Q) + q] = r.imag();
  }
  return out;
}

}  // namespace

std::vector<double> PhaseCentering::to_model(std::span<const double> c) const {
  return rotate_coefficients(*this, c, -1.0);
}

std::vector<double> PhaseCentering::to_centred(std::span<const double> eta) const {
  return rotate_coefficients(*this, eta, 1.0);
}

std::vector<double> PhaseCentering::pull_back(std::span<const double> eta,
                                              std::span<const double> grad_eta) const {
  std::vector<double> g(grad_eta.begin(), grad_eta.end());
  if (identity_) return g;
  const std::size_t Q = (eta.size() - 1) / 6;
  for (std::size_t q = 0; q < Q; ++q) {
    const std::size_t ire = ParamState::bre_offset(Q) + q, iim = ParamState::bim_offset(Q) + q;
    const std::size_t it = ParamState::delay_offset(Q) + q, iff = ParamState::doppler_offset(Q) + q,
                      ia = ParamState::angle_offset(Q) + q;
    const cplx b{eta[ire], eta[iim]};
    const cplx gb{grad_eta[ire], grad_eta[iim]};
    // b = b' exp(-j phi): d b / d x = -j phi_x b for x in (tau, f_D, theta).
    const double twist = std::imag(std::conj(gb) * b);
    const auto dphi = phase_gradient(eta[ia]);
    g[it] += dphi[0] * twist;
    g[iff] += dphi[1] * twist;
    g[ia] += dphi[2] * twist;
    const cplx gc = gb * std::polar(1.0, phase(eta[it], eta[iff], eta[ia]));
    g[ire] = gc.real();
    g[iim] = gc.imag();
  }
  return g;
}

CoordinateMap interval_map(const PriorConfig& pc) {
  const std::size_t Q = pc.q;
  std::vector<CoordinateMap::Axis> axes(ParamState::dimension(Q));
  for (std::size_t q = 0; q < Q; ++q) {
    axes[ParamState::delay_offset(Q) + q].scale = pc.delay.support.width();
    axes[ParamState::doppler_offset(Q) + q].scale = pc.doppler.support.width();
    axes[ParamState::angle_offset(Q) + q].scale = pc.angle.support.width();
  }
  return CoordinateMap(std::move(axes));
}

namespace {

CoordinateMap::Axis logit_axis(double eta0, const Interval& iv, double unit) {
  CoordinateMap::Axis a;
  a.kind = CoordinateMap::Kind::kLogit;
  a.lo = iv.lo;
  a.width = iv.width();
  // Local slope `unit` at eta0, but no steeper than the slope at 0.1 / 0.9 of
  // the box: a steep logit near an edge makes the Jacobian term dominate.
  const double p = (eta0 - iv.lo) / iv.width();
  a.scale = unit / (iv.width() * std::max(p * (1.0 - p), 0.09));
  return a;
}

CoordinateMap::Axis log_axis(double scale) {
  CoordinateMap::Axis a;
  a.kind = CoordinateMap::Kind::kLog;
  a.scale = scale;
  return a;
}

}  // namespace

CoordinateMap curvature_map(const ParamState& eta0, const PriorConfig& pc, const CTensor3& tx,
                            const SystemConfig& cfg, double weight, const SamplerConfig& sc,
                            const PhaseCentering& centring) {
  const std::size_t Q = eta0.q();
  const RayleighCells cells = rayleigh_cells(cfg);
  std::vector<CoordinateMap::Axis> axes(ParamState::dimension(Q));
  const double gain = sc.curvature_gain;

  for (std::size_t q = 0; q < Q; ++q) {
    Target t;
    t.refl = eta0.b(q);
    t.delay_s = eta0.delay[q];
    t.doppler_hz = eta0.doppler[q];
    t.angle_rad = eta0.angle[q];
    const std::vector<Target> one{t};
    const FimBlock fim = classical_fim(one, tx, eta0.xi, cfg);
    // Tempered information of this slot alone plus its prior curvature.
    Eigen::Matrix<double, 5, 5> info = weight * fim.matrix.topLeftCorner<5, 5>();
    info(0, 0) += 2.0 / eta0.rho[q];
    info(1, 1) += 2.0 / eta0.rho[q];
    info(2, 2) += 1.0 / (pc.delay.sd * pc.delay.sd);
    info(3, 3) += 1.0 / (pc.doppler.sd * pc.doppler.sd);
    info(4, 4) += 1.0 / (pc.angle.sd * pc.angle.sd);
    if (!centring.identity()) {
      // Information in the centred coordinates: A^T info A with A = d model / d centred.
      const double phi = centring.phase(t.delay_s, t.doppler_hz, t.angle_rad);
      const auto dphi = centring.phase_gradient(t.angle_rad);
      Eigen::Matrix<double, 5, 5> A = Eigen::Matrix<double, 5, 5>::Identity();
      const cplx rot = std::polar(1.0, -phi);
      A(0, 0) = rot.real();
      A(0, 1) = -rot.imag();
      A(1, 0) = rot.imag();
      A(1, 1) = rot.real();
      for (int x = 0; x < 3; ++x) {
        const cplx db = cplx{0.0, -dphi[static_cast<std::size_t>(x)]} * t.refl;
        A(0, 2 + x) = db.real();
        A(1, 2 + x) = db.imag();
      }
      info = A.transpose() * info * A;
    }
    // Conditional deviations: the proposal is diagonal, so a move along one
    // axis must stay inside the posterior with the other axes held fixed.
    Eigen::Matrix<double, 5, 1> sd;
    for (int i = 0; i < 5; ++i) sd(i) = 1.0 / std::sqrt(info(i, i));
    auto capped = [&](double s, double cell, const Interval& iv) {
      return std::min({gain * s, sc.max_unit_cells * cell, 0.25 * iv.width()});
    };
    axes[ParamState::bre_offset(Q) + q].scale = gain * sd(0);
    axes[ParamState::bim_offset(Q) + q].scale = gain * sd(1);
    axes[ParamState::delay_offset(Q) + q] =
        logit_axis(eta0.delay[q], pc.delay.support, capped(sd(2), cells.delay_s, pc.delay.support));
    axes[ParamState::doppler_offset(Q) + q] = logit_axis(
        eta0.doppler[q], pc.doppler.support, capped(sd(3), cells.doppler_hz, pc.doppler.support));
    axes[ParamState::angle_offset(Q) + q] =
        logit_axis(eta0.angle[q], pc.angle.support, capped(sd(4), cells.angle_rad, pc.angle.support));
    axes[ParamState::rho_offset(Q) + q] = log_axis(gain);
  }
  // The tempered posterior of log xi has a spread near 1 / sqrt(H^gamma).
  const double h_gamma = weight * static_cast<double>(cfg.data_size());
  axes[ParamState::xi_offset(Q)] = log_axis(gain / std::sqrt(h_gamma));
  return CoordinateMap(std::move(axes));
}

namespace {

double clamp_inside(double x, const Interval& iv, double margin) {
  const double m = margin * iv.width();
  return std::clamp(x, iv.lo + m, iv.hi - m);
}

// Keeps a state away from the box edges so that gradients and the logit
// coordinates stay finite.
void pull_inside(ParamState& s, const PriorConfig& pc) {
  constexpr double kMargin = 1e-3;
  for (std::size_t q = 0; q < s.q(); ++q) {
    s.delay[q] = clamp_inside(s.delay[q], pc.delay.support, kMargin);
    s.doppler[q] = clamp_inside(s.doppler[q], pc.doppler.support, kMargin);
    s.angle[q] = clamp_inside(s.angle[q], pc.angle.support, kMargin);
    s.rho[q] = std::clamp(s.rho[q], pc.rho_bounds.lo * 10.0, pc.rho_bounds.hi * 0.1);
  }
  s.xi = std::clamp(s.xi, pc.xi_bounds.lo * 10.0, pc.xi_bounds.hi * 0.1);
}

ParamState prior_state(const PriorConfig& pc, Rng& rng) {
  ParamState s(pc.q);
  for (std::size_t q = 0; q < pc.q; ++q) {
    s.delay[q] = pc.delay.sample(rng);
    s.doppler[q] = pc.doppler.sample(rng);
    s.angle[q] = pc.angle.sample(rng);
    s.rho[q] = pc.rho.sample(rng);
  }
  s.xi = pc.xi.sample(rng);
  return s;
}

ParamState rescaled(ParamState s, double amp) {
  for (std::size_t q = 0; q < s.q(); ++q) {
    s.b_re[q] *= amp;
    s.b_im[q] *= amp;
    s.rho[q] *= amp * amp;
  }
  s.xi /= amp * amp;
  return s;
}

}  // namespace

namespace {

using CVec = Eigen::VectorXcd;

CVec atom_vector(const GridPoint& p, const CTensor3& tx, const SystemConfig& cfg) {
  const auto d = atom(p.delay_s, p.doppler_hz, p.angle_rad, tx, cfg);
  return Eigen::Map<const CVec>(d.data(), static_cast<Eigen::Index>(d.size()));
}

// Normalized single-atom fit |d^H r|^2 / ||d||^2.
double fit_gain(const GridPoint& p, const CVec& r, const CTensor3& tx, const SystemConfig& cfg) {
  const CVec d = atom_vector(p, tx, cfg);
  const double e = d.squaredNorm();
  return e > 0.0 ? std::norm(d.dot(r)) / e : 0.0;
}

// Golden-section maximization of the single-atom fit along one coordinate.
void refine_axis(GridPoint& p, double GridPoint::*axis, double half_width, const Interval& box,
                 const CVec& r, const CTensor3& tx, const SystemConfig& cfg) {
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = std::max(p.*axis - half_width, box.lo);
  double hi = std::min(p.*axis + half_width, box.hi);
  auto eval = [&](double v) {
    GridPoint q = p;
    q.*axis = v;
    return fit_gain(q, r, tx, cfg);
  };
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 0; it < 24; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = eval(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = eval(x1);
    }
  }
  const double best = f1 > f2 ? x1 : x2;
  if (eval(best) > eval(p.*axis)) p.*axis = best;
}

struct PursuitState {
  std::vector<GridPoint> points;
  Eigen::MatrixXcd atoms;
  CVec coef;
  CVec residual;
};

void refit(PursuitState& st, const CVec& y) {
  st.coef = st.atoms.colPivHouseholderQr().solve(y);
  st.residual = y - st.atoms * st.coef;
}

// Greedy pursuit on the grid; each new atom and, at the end, every atom is
// moved off the grid by coordinate search against the residual that
// excludes it.
PursuitState refined_pursuit(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                             const PriorConfig& pc, const GridSpec& grid, std::size_t count) {
  const GridCorrelator corr(grid, tx, cfg);
  const auto H = static_cast<Eigen::Index>(y.size());
  const CVec yv = Eigen::Map<const CVec>(y.data(), H);
  const double step_delay = grid.n_delay > 1 ? grid.delay_s.width() / static_cast<double>(grid.n_delay - 1) : 0.0;
  const double step_doppler = grid.n_doppler > 1 ? grid.doppler_hz.width() / static_cast<double>(grid.n_doppler - 1) : 0.0;
  const double step_angle = grid.n_angle > 1 ? grid.angle_rad.width() / static_cast<double>(grid.n_angle - 1) : 0.0;

  PursuitState st;
  st.atoms.resize(H, 0);
  st.residual = yv;
  auto polish = [&](std::size_t j) {
    const CVec others = st.residual + st.atoms.col(static_cast<Eigen::Index>(j)) * st.coef(static_cast<Eigen::Index>(j));
    GridPoint& p = st.points[j];
    for (int cycle = 0; cycle < 2; ++cycle) {
      if (step_delay > 0.0) refine_axis(p, &GridPoint::delay_s, step_delay, pc.delay.support, others, tx, cfg);
      if (step_doppler > 0.0) refine_axis(p, &GridPoint::doppler_hz, step_doppler, pc.doppler.support, others, tx, cfg);
      if (step_angle > 0.0) refine_axis(p, &GridPoint::angle_rad, step_angle, pc.angle.support, others, tx, cfg);
    }
    st.atoms.col(static_cast<Eigen::Index>(j)) = atom_vector(p, tx, cfg);
    refit(st, yv);
  };

  const double y_energy = yv.squaredNorm();
  for (std::size_t i = 0; i < count; ++i) {
    if (st.residual.squaredNorm() <= 1e-26 * y_energy) break;
    const auto c = corr.correlate(std::span<const cplx>(st.residual.data(), y.size()));
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t g = 0; g < c.size(); ++g) {
      const double sc = std::norm(c[g]) / corr.atom_energy(g);
      if (sc > best_score) {
        best_score = sc;
        best = g;
      }
    }
    st.points.push_back(grid.point(best));
    st.atoms.conservativeResize(Eigen::NoChange, st.atoms.cols() + 1);
    st.atoms.col(st.atoms.cols() - 1) = atom_vector(st.points.back(), tx, cfg);
    refit(st, yv);
    polish(st.points.size() - 1);
  }
  for (std::size_t j = 0; j < st.points.size(); ++j) polish(j);
  return st;
}

}  // namespace

ParamState initial_state(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                         const PriorConfig& pc, const SamplerConfig& sc, Rng& rng) {
  ParamState s = prior_state(pc, rng);
  if (sc.init == InitMode::kMatchedFilter) {
    const GridSpec grid = GridSpec::per_cell(cfg, pc.delay.support, pc.doppler.support,
                                             pc.angle.support, sc.init_points_per_cell);
    const PursuitState fit = refined_pursuit(y, tx, cfg, pc, grid, pc.q);
    for (std::size_t i = 0; i < fit.points.size(); ++i) {
      const cplx b = fit.coef(static_cast<Eigen::Index>(i));
      s.delay[i] = fit.points[i].delay_s;
      s.doppler[i] = fit.points[i].doppler_hz;
      s.angle[i] = fit.points[i].angle_rad;
      s.b_re[i] = b.real();
      s.b_im[i] = b.imag();
      s.rho[i] = std::norm(b);
    }
    const double res_power = fit.residual.squaredNorm() / static_cast<double>(y.size());
    if (res_power > 0.0) s.xi = 1.0 / res_power;
  }
  pull_inside(s, pc);
  return s;
}

ChainResult run_chain(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                      const PriorConfig& pc, const SamplerConfig& sc,
                      const ChainControls& controls) {
  cfg.validate();
  pc.validate();
  const std::size_t H = cfg.data_size();
  if (y.size() != H) throw_input("run_chain: observation length does not match configuration");
  if (!tx.same_shape(cfg)) throw_input("run_chain: transmit tensor does not match configuration");
  sc.validate(H);
  const std::size_t Q = pc.q, F = ParamState::dimension(Q);

  double amp = 1.0;
  if (sc.normalize_power) {
    const double p = mean_power(y);
    if (p > 0.0 && std::isfinite(p)) amp = std::sqrt(p);
  }
  std::vector<cplx> yn(y.begin(), y.end());
  for (auto& v : yn) v /= amp;

  Rng rng(sc.seed);
  ParamState eta0;
  if (controls.initial) {
    if (controls.initial->q() != Q) throw_input("run_chain: initial state has the wrong slot count");
    eta0 = rescaled(*controls.initial, 1.0 / amp);
    if (!strictly_inside(eta0, pc)) throw_input("run_chain: initial state outside the prior support");
  } else {
    eta0 = initial_state(yn, tx, cfg, pc, sc, rng);
  }

  const double gamma = gamma_exponent(sc.batch_size, H, sc.upsilon);
  const double weight = std::pow(static_cast<double>(H), gamma) / static_cast<double>(H);
  const bool curved = sc.scaling == Scaling::kCurvature;
  const PhaseCentering centring = curved ? PhaseCentering(cfg) : PhaseCentering();
  const CoordinateMap map =
      curved ? curvature_map(eta0, pc, tx, cfg, weight, sc, centring) : interval_map(pc);

  std::vector<double> eta = eta0.flatten();
  std::vector<double> u = map.to_unit(centring.to_centred(eta));
  AdamState adam(F);
  BatchSampler batches(H, sc.batch_size);
  MiniBatch batch;
  batch.total = H;
  batch.indices.resize(sc.batch_size);
  batch.values.resize(sc.batch_size);

  ChainResult result;
  ChainDiagnostics& diag = result.diagnostics;
  diag.power_scale = amp;
  diag.trace.reserve(sc.iterations());
  std::vector<double> sum(F, 0.0);

  for (std::size_t it = 0; it < sc.iterations(); ++it) {
    const auto idx = batches.draw(rng);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      batch.indices[j] = idx[j];
      batch.values[j] = yn[idx[j]];
    }
    const ParamState current = ParamState::unflatten(eta, Q);
    const TemperedValue cur = evaluate_tempered(current, batch, pc, tx, cfg, gamma, true);
    const double cur_val = cur.value + map.log_jacobian(u);
    const std::vector<double> grad = map.pull_back(u, centring.pull_back(eta, cur.grad));

    const double step = learning_rate(it + 1, sc.step0);
    const AdamStep move = adam_update(adam, grad, sc, step);
    std::vector<double> u_new = propose(u, move, step, &rng);
    std::vector<double> eta_new = centring.to_model(map.to_natural(u_new));
    const ParamState candidate = ParamState::unflatten(eta_new, Q);

    double new_val = kOutsideSupport;
    const bool finite = std::all_of(eta_new.begin(), eta_new.end(),
                                    [](double v) { return std::isfinite(v); });
    if (finite && strictly_inside(candidate, pc)) {
      new_val = tempered_logpost(candidate, batch, pc, tx, cfg, gamma) + map.log_jacobian(u_new);
    } else {
      ++diag.out_of_bounds;
    }
    bool accept = mh_accept(new_val, cur_val, rng);
    if (controls.policy == AcceptPolicy::kRejectAll) accept = false;
    if (accept) {
      u = std::move(u_new);
      eta = std::move(eta_new);
      ++diag.accepted;
      diag.trace.push_back(new_val);
    } else {
      diag.trace.push_back(cur_val);
    }
    if (it >= sc.n_burn) {
      for (std::size_t i = 0; i < F; ++i) sum[i] += eta[i];
      if (controls.record_samples) {
        result.samples.push_back(rescaled(ParamState::unflatten(eta, Q), amp));
      }
    }
  }

  diag.iterations = sc.iterations();
  diag.acceptance_rate =
      static_cast<double>(diag.accepted) / static_cast<double>(std::max<std::size_t>(1, diag.iterations));
  for (auto& v : sum) v /= static_cast<double>(sc.n_samples);
  const ParamState mean_state = ParamState::unflatten(sum, Q);
  const double lp = log_prior(mean_state, pc);
  diag.final_log_posterior =
      outside_support(lp) ? kOutsideSupport : log_likelihood(mean_state, yn, tx, cfg) + lp;
  result.estimate = rescaled(mean_state, amp);
  return result;
}

ChainResult run_chains(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                       const PriorConfig& pc, const SamplerConfig& sc) {
  SamplerConfig first = sc;
  ChainResult best = run_chain(y, tx, cfg, pc, first);
  for (std::size_t r = 1; r < sc.chains; ++r) {
    SamplerConfig other = sc;
    other.seed = derive_seed(sc.seed, r);
    ChainResult cand = run_chain(y, tx, cfg, pc, other);
    if (cand.diagnostics.final_log_posterior > best.diagnostics.final_log_posterior) {
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace isac
