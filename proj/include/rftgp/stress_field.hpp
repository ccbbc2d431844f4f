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

#ifndef RFTGP_STRESS_FIELD_HPP_
#define RFTGP_STRESS_FIELD_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rftgp/kernel.hpp"

namespace rftgp {

struct GridAxes {
  std::vector<double> beta;
  std::vector<double> gamma;
};

/// Uniform nodes over [-pi/2, pi/2] on both axes (37 x 37 is 5 degree spacing).
GridAxes uniform_axes(int beta_nodes = 37, int gamma_nodes = 37);

/// Stress per unit depth (N/m^3) on a (beta, gamma) grid. Rows index beta.
struct GridStressMap {
  std::vector<double> beta_axis;
  std::vector<double> gamma_axis;
  Eigen::MatrixXd values_z;
  Eigen::MatrixXd values_x;

  GridAxes axes() const { return {beta_axis, gamma_axis}; }
};

void validate(const GridStressMap& map);

struct StressValue {
  double z = 0.0;
  double x = 0.0;
  bool clamped = false;  // gamma fell outside the axis range
};

/// Bilinear lookup. beta wraps modulo pi into the axis domain; gamma clamps.
StressValue eval_map(const GridStressMap& map, double beta, double gamma);

/// Any (beta, gamma) -> stress evaluator: grid maps, scaled bases, posteriors.
using StressField = std::function<StressValue(double, double)>;

StressField as_field(const GridStressMap& map);

/// One joint draw of (alpha_z, alpha_x) from the zero-mean prior at the grid
/// nodes. When the beta axis spans exactly pi the last row repeats the first.
GridStressMap sample_prior_map(const KernelConfig& kernel_z,
                               const KernelConfig& kernel_x,
                               std::uint64_t seed, const GridAxes& axes);

GridStressMap scale_map(const GridStressMap& base, double zeta_z,
                        double zeta_x);

/// Scaled base profile plus an optional additive residual field.
struct ScaledBaseMap {
  GridStressMap base;
  double zeta_z = 1.0;
  double zeta_x = 1.0;
  StressField residual;  // may be empty

  StressValue operator()(double beta, double gamma) const;
};

std::string format_stress_map(const GridStressMap& map);
GridStressMap parse_stress_map(const std::string& text,
                               const std::string& origin);
void write_stress_map(const std::string& path, const GridStressMap& map);
GridStressMap read_stress_map(const std::string& path);

}  // namespace rftgp

#endif  // RFTGP_STRESS_FIELD_HPP_
