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

#ifndef RFTGP_KERNEL_HPP_
#define RFTGP_KERNEL_HPP_

#include <array>
#include <vector>

#include <Eigen/Core>

namespace rftgp {

/// Interaction angles (beta, gamma).
using Angles = Eigen::Vector2d;

/// Squared-exponential kernel over the periodic embedding
/// (sin 2beta, cos 2beta, sin gamma, cos gamma). Prior mean is zero.
struct KernelConfig {
  double signal_variance = 1.0;
  std::array<double, 4> lengthscales = {1.0, 1.0, 1.0, 1.0};
};

void validate(const KernelConfig& config);

Eigen::Vector4d embed(const Angles& theta);

double kernel_eval(const Angles& a, const Angles& b,
                   const KernelConfig& config);

/// Kernel between pre-embedded feature rows (n x 4 and k x 4).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixX4d& a,
                              const Eigen::MatrixX4d& b,
                              const KernelConfig& config);

Eigen::MatrixX4d embed_all(const std::vector<Angles>& thetas);

}  // namespace rftgp

#endif  // RFTGP_KERNEL_HPP_
