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

#include "rftgp/fivebar.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "rftgp/error.hpp"

namespace rftgp {
namespace {

double radicand(double g, const FiveBarParams& p) {
  const double s = std::sin(g);
  return p.l2 * p.l2 - p.l1 * p.l1 * s * s;
}

double leg_length(double g, const FiveBarParams& p) {
  return p.l3 + p.l1 * std::cos(g) + std::sqrt(radicand(g, p));
}

void check_workspace(double g, const FiveBarParams& p) {
  if (!(radicand(g, p) > 0.0)) {
    std::ostringstream msg;
    msg << "five-bar configuration outside workspace (half-spread " << g
        << " rad)";
    throw Error(ErrorCode::kInvalidSpec, msg.str());
  }
}

}  // namespace

void validate(const FiveBarParams& params) {
  if (!(params.l1 > 0.0 && params.l2 > 0.0 && params.l3 >= 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "five-bar link lengths must be positive");
  }
}

Eigen::Vector2d fivebar_position(const JointAngles& q,
                                 const FiveBarParams& params) {
  const double theta = 0.5 * (q.phi1 + q.phi2);
  const double g = 0.5 * (-q.phi1 + q.phi2);
  check_workspace(g, params);
  const double l = leg_length(g, params);
  return {l * std::sin(theta), l * std::cos(theta)};
}

Eigen::Matrix2d fivebar_jacobian(const JointAngles& q,
                                 const FiveBarParams& params) {
  const double theta = 0.5 * (q.phi1 + q.phi2);
  const double g = 0.5 * (-q.phi1 + q.phi2);
  check_workspace(g, params);
  const double l = leg_length(g, params);
  // dl/dg
  const double phi = -params.l1 * std::sin(g) *
                     (1.0 + params.l1 * std::cos(g) / std::sqrt(radicand(g, params)));
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  Eigen::Matrix2d j;
  j << -phi * s + l * c, phi * s + l * c,
       -phi * c - l * s, phi * c - l * s;
  return 0.5 * j;
}

JointAngles fivebar_inverse(const Eigen::Vector2d& toe,
                            const FiveBarParams& params) {
  validate(params);
  const double l = toe.norm();
  const double theta = std::atan2(toe.x(), toe.y());
  // l(g) decreases monotonically on [0, g_max]; g_max is pi when l2 > l1.
  double lo = 0.0;
  double hi = params.l2 > params.l1 ? std::numbers::pi
                                    : std::asin(params.l2 / params.l1);
  if (params.l2 <= params.l1) hi *= (1.0 - 1e-12);
  if (l > leg_length(lo, params) || l < leg_length(hi, params)) {
    throw Error(ErrorCode::kInvalidSpec, "toe position outside five-bar reach");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (leg_length(mid, params) > l) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double g = 0.5 * (lo + hi);
  return {theta - g, theta + g};
}

double condition_number(const Eigen::Matrix2d& j) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(j);
  const auto& sv = svd.singularValues();
  if (sv[1] == 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / sv[1];
}

bool is_singular(const Eigen::Matrix2d& j, double threshold) {
  return !(condition_number(j) <= threshold);
}

Eigen::Vector2d force_to_torque(const Eigen::Matrix2d& j,
                                const Eigen::Vector2d& force) {
  return j.transpose() * force;
}

Eigen::Vector2d torque_to_force(const Eigen::Matrix2d& j,
                                const Eigen::Vector2d& torque) {
  if (is_singular(j)) {
    std::ostringstream msg;
    msg << "singular Jacobian (condition number " << condition_number(j)
        << ") for J = [" << j(0, 0) << ", " << j(0, 1) << "; " << j(1, 0)
        << ", " << j(1, 1) << "]";
    throw Error(ErrorCode::kSingular, msg.str());
  }
  return j.transpose().partialPivLu().solve(torque);
}

Eigen::Vector2d current_to_torque(const Eigen::Vector2d& current,
                                  double torque_constant) {
  return torque_constant * current;
}

}  // namespace rftgp
