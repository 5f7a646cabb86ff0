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

#include "isac/detector.hpp"
#include "isac/posterior.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// Matched-filter resolution limits.
struct RayleighCells {
  double range_m = 0.0;       ///< c / (2 M df)
  double velocity_mps = 0.0;  ///< lambda / (2 K T_s)
  double angle_rad = 0.0;     ///< 0.886 lambda / D with aperture D = lambda (N - 1) / 2
  double delay_s = 0.0;       ///< range cell in delay units
  double doppler_hz = 0.0;    ///< velocity cell in Doppler units
};

RayleighCells rayleigh_cells(const SystemConfig& cfg);

struct GridPoint {
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double angle_rad = 0.0;
};

/// Uniform delay x Doppler x angle grid. A dimension with one point sits at
/// the interval midpoint. Flat index g = (i_angle * P_f + i_doppler) * P_tau + i_delay.
struct GridSpec {
  Interval delay_s;
  Interval doppler_hz;
  Interval angle_rad;
  std::size_t n_delay = 1;
  std::size_t n_doppler = 1;
  std::size_t n_angle = 1;

  std::size_t size() const { return n_delay * n_doppler * n_angle; }
  std::size_t index(std::size_t i_delay, std::size_t i_doppler, std::size_t i_angle) const {
    return (i_angle * n_doppler + i_doppler) * n_delay + i_delay;
  }
  double delay_at(std::size_t i) const;
  double doppler_at(std::size_t i) const;
  double angle_at(std::size_t i) const;
  GridPoint point(std::size_t g) const;

  /// Spacing of at most one Rayleigh cell / points_per_cell in every dimension.
  static GridSpec per_cell(const SystemConfig& cfg, Interval delay_s, Interval doppler_hz,
                           Interval angle_rad, double points_per_cell);

  /// Throws Error(kConfig) for an empty grid or inverted bounds.
  void validate() const;
};

/// Correlates an observation against every grid atom without forming the
/// dictionary: beamform per angle, DFT over symbols, then sum over subcarriers.
class GridCorrelator {
 public:
  GridCorrelator(GridSpec grid, const CTensor3& tx, const SystemConfig& cfg);

  /// c[g] = atom(g)^H r for every grid point.
  std::vector<cplx> correlate(std::span<const cplx> r) const;

  /// ||atom(g)||^2; depends on the angle index only.
  double atom_energy(std::size_t g) const;

  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  SystemConfig cfg_;
  std::vector<cplx> steer_;         // P_theta x N
  std::vector<cplx> beam_conj_;     // P_theta x (M K), conj(a^T x_{m,k})
  std::vector<double> energy_;      // P_theta
  std::vector<cplx> doppler_tab_;   // K x P_f, exp(-j 2 pi k f T_s)
  std::vector<cplx> delay_tab_;     // M x P_tau, exp(+j 2 pi m df tau)
};

struct Peak {
  std::size_t index = 0;
  GridPoint point;
  double power = 0.0;
};

struct PowerMap {
  GridSpec grid;
  std::vector<double> power;  ///< |atom^H y|^2 / ||atom||^2
  std::vector<Peak> peaks;    ///< descending power
};

/// Matched-filter map with greedy non-maximum suppression inside one
/// Rayleigh cell per dimension. At most `max_peaks` peaks are kept.
PowerMap periodogram(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
                     const GridSpec& grid, std::size_t max_peaks = 16);

/// Ranges of the local maxima of the matched-filter power along delay with
/// Doppler and angle held fixed, sampled at `n_points` over `delay_s`.
std::vector<double> range_cut_maxima(std::span<const cplx> y, const CTensor3& tx,
                                     const SystemConfig& cfg, Interval delay_s,
                                     std::size_t n_points, double doppler_hz, double angle_rad);

struct OmpStop {
  std::size_t max_targets = 10;
  /// Stop once ||r||^2 <= residual_tol * ||y||^2.
  double residual_tol = 0.0;
};

struct OmpResult {
  DetectionResult detection;           ///< descending |b|
  std::vector<std::size_t> selected;   ///< grid indices in selection order
  std::vector<cplx> coefficients;      ///< least-squares fit, selection order
  std::vector<double> residual_norms;  ///< ||r|| before the first and after each step
};

/// Orthogonal matching pursuit over the grid with a least-squares refit of
/// all selected atoms at every step. Throws Error(kConfig) on an empty grid.
OmpResult omp(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
              const GridSpec& grid, const OmpStop& stop);

/// Same as omp() with a prebuilt correlator, for repeated calls on one grid.
OmpResult omp(std::span<const cplx> y, const CTensor3& tx, const SystemConfig& cfg,
              const GridCorrelator& corr, const OmpStop& stop);

}  // namespace isac
