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

#ifndef RFTGP_FIVEBAR_HPP_
#define RFTGP_FIVEBAR_HPP_

#include <Eigen/Core>

namespace rftgp {

/// Symmetric five-bar leg. The toe sits at (x, y) = l * (sin theta, cos theta)
/// with theta = (phi1 + phi2) / 2, half-spread g = (phi2 - phi1) / 2 and
/// l = l3 + l1 cos g + sqrt(l2^2 - l1^2 sin^2 g). y points away from the hip
/// (downward when the leg stands).
struct FiveBarParams {
  double l1 = 0.1;
  double l2 = 0.25;
  double l3 = 0.05;
  double torque_constant = 0.0973;  // N*m/A
};

struct JointAngles {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

inline constexpr double kSingularConditionNumber = 1e8;

void validate(const FiveBarParams& params);

Eigen::Vector2d fivebar_position(const JointAngles& q,
                                 const FiveBarParams& params);

/// d(x, y) / d(phi1, phi2). Throws kInvalidSpec outside the workspace
/// (l2^2 <= l1^2 sin^2 g).
Eigen::Matrix2d fivebar_jacobian(const JointAngles& q,
                                 const FiveBarParams& params);

/// Joint angles reaching (x, y) on the g >= 0 branch.
JointAngles fivebar_inverse(const Eigen::Vector2d& toe,
                            const FiveBarParams& params);

/// Ratio of singular values; +inf for rank-deficient matrices.
double condition_number(const Eigen::Matrix2d& j);

bool is_singular(const Eigen::Matrix2d& j,
                 double threshold = kSingularConditionNumber);

/// tau = J^T F.
Eigen::Vector2d force_to_torque(const Eigen::Matrix2d& j,
                                const Eigen::Vector2d& force);

/// F = J^{-T} tau. Throws kSingular above the condition-number threshold.
Eigen::Vector2d torque_to_force(const Eigen::Matrix2d& j,
                                const Eigen::Vector2d& torque);

/// tau = k_t * I.
Eigen::Vector2d current_to_torque(const Eigen::Vector2d& current,
                                  double torque_constant);

}  // namespace rftgp

#endif  // RFTGP_FIVEBAR_HPP_
