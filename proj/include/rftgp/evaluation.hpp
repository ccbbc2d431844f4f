// Copyright 2026 The rftgp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RFTGP_EVALUATION_HPP_
#define RFTGP_EVALUATION_HPP_

#include <numbers>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "rftgp/forward_model.hpp"
#include "rftgp/stress_field.hpp"

namespace rftgp {

using GridMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct ComponentMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  double rmse_pct = 0.0;  // percent of the truth range
  double mae_pct = 0.0;
  double r2 = 0.0;
  double pearson = 0.0;
  double acr_pct = 0.0;   // nodes with |error| <= 5% of the truth range
  int nodes = 0;
  bool normalized_defined = true;  // false when the truth range is zero
};

struct MetricsReport {
  ComponentMetrics z;
  ComponentMetrics x;
};

/// Error and fit metrics over the (masked) grid nodes. The truth range used
/// for the normalized metrics and ACR is taken over the full truth grid.
/// Undefined normalized metrics (zero range) are NaN; so are R^2 and Pearson
/// when a variance vanishes.
MetricsReport reconstruction_metrics(const GridStressMap& estimate,
                                     const GridStressMap& truth,
                                     const std::optional<GridMask>& mask = {});

/// Nodes within `radius` (rad, Euclidean with beta taken modulo pi) of any
/// weighted sample in the dataset.
GridMask sampled_region_mask(const CompositeDataset& data, const GridAxes& axes,
                             double radius = std::numbers::pi / 36.0);

struct SamplingDiagnostics {
  double redundancy = 0.0;
  int unique_samples = 0;
  int total_samples = 0;
  int coverage_bins = 0;
  double coverage_area = 0.0;  // rad^2
  int sign_region_hits = 0;    // samples with gamma > pi/3
};

inline constexpr double kDefaultAngleQuantum = std::numbers::pi / 180.0;
inline constexpr double kDefaultCoverageBin = std::numbers::pi / 36.0;

/// Statistics over weighted (submerged, moving) segment samples.
SamplingDiagnostics sampling_diagnostics(
    const CompositeDataset& data, double angle_quantum = kDefaultAngleQuantum,
    double bin_size = kDefaultCoverageBin);

/// "key = value" lines, one per metric, prefixed per component.
std::string format_metrics(const MetricsReport& report,
                           const std::string& prefix = "");
std::string format_diagnostics(const SamplingDiagnostics& diag,
                               const std::string& prefix = "");

}  // namespace rftgp

#endif  // RFTGP_EVALUATION_HPP_
