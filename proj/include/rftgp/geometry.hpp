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

#ifndef RFTGP_GEOMETRY_HPP_
#define RFTGP_GEOMETRY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rftgp {

// Planar geometry lives in the (x, z) plane: x horizontal, z up.

enum class ToeKind { kIToe, kCToe };

struct ToeSpec {
  ToeKind kind = ToeKind::kCToe;
  double size = 0.02;  // plate length (I-Toe) or arc radius (C-Toe), m
  double width = 0.008;
  int segment_count = 10;
  double attitude = 0.0;  // fixed body-frame rotation, rad
};

struct ToeSegment {
  Eigen::Vector2d center;  // body frame
  double tangent_angle = 0.0;
  double area = 0.0;
  // Zero for two-sided plates.
  Eigen::Vector2d outward_normal = Eigen::Vector2d::Zero();
};

/// A toe discretized into surface segments. The body origin is the lowest
/// point of the toe at zero attitude, so a pose at z = 0 just touches a
/// surface at height 0. The C-Toe is the lower half of a circle (opening up).
struct Toe {
  ToeSpec spec;
  std::vector<ToeSegment> segments;

  double total_area() const;
};

Toe make_toe(const ToeSpec& spec);

enum class TrajectoryKind { kRectangle, kCubicSpline, kRotation };

struct RectangleGait {
  double penetration = 0.05;
  double shear = 0.4;
  double extraction = 0.05;
};

struct SplineGait {
  // (x, z) in meters, x strictly increasing.
  std::vector<Eigen::Vector2d> control_points;
};

struct RotationGait {
  Eigen::Vector2d center = Eigen::Vector2d(0.0, 0.02);
  double angular_range = 3.141592653589793;
  int direction = 1;
};

struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::kRectangle;
  RectangleGait rectangle;
  SplineGait spline;
  RotationGait rotation;
  int sample_count = 100;
  double speed = 0.02;  // m/s along the path
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
};

struct Pose {
  Eigen::Vector2d position;
  double orientation = 0.0;
  double time = 0.0;
};

using PoseSequence = std::vector<Pose>;

PoseSequence make_trajectory(const TrajectorySpec& spec);

/// Natural cubic spline z(x) through the given knots.
class NaturalCubicSpline {
 public:
  explicit NaturalCubicSpline(const std::vector<Eigen::Vector2d>& knots);

  double value(double x) const;
  double derivative(double x) const;
  std::size_t piece_count() const { return xs_.size() - 1; }
  double knot_x(std::size_t i) const { return xs_[i]; }

 private:
  std::size_t piece(double x) const;

  std::vector<double> xs_;
  std::vector<double> zs_;
  std::vector<double> second_;  // z'' at knots
};

struct SegmentState {
  double beta = 0.0;   // tangent angle from horizontal, in [-pi/2, pi/2)
  double gamma = 0.0;  // velocity vs. surface normal, in [-pi/2, pi/2]
  double depth = 0.0;
  double area = 0.0;
  bool submerged = false;
  bool moving = true;    // false when speed < 1e-9 m/s (gamma undefined)
  bool leading = true;   // velocity pushes into the medium through this face
};

struct SegmentStateSeries {
  int steps = 0;
  int segments = 0;
  std::vector<SegmentState> states;  // row-major: step * segments + segment
  std::vector<double> timestamps;
  std::vector<Eigen::Vector2d> reference_positions;  // toe origin per step

  const SegmentState& at(int step, int segment) const {
    return states[static_cast<std::size_t>(step) * segments + segment];
  }
  SegmentState& at(int step, int segment) {
    return states[static_cast<std::size_t>(step) * segments + segment];
  }
};

inline constexpr double kMinSpeed = 1e-9;

SegmentStateSeries segment_states(const Toe& toe, const PoseSequence& poses,
                                  double surface_height = 0.0);

/// Maps an angle into the pi-periodic domain [-pi/2, pi/2).
double normalize_beta(double beta);

/// CSV with columns step,segment,beta,gamma,depth_m,area_m2,submerged.
std::string segment_states_csv(const SegmentStateSeries& series);

}  // namespace rftgp

#endif  // RFTGP_GEOMETRY_HPP_
