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

#ifndef RFTGP_FORWARD_MODEL_HPP_
#define RFTGP_FORWARD_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rftgp/fivebar.hpp"
#include "rftgp/geometry.hpp"
#include "rftgp/kernel.hpp"
#include "rftgp/stress_field.hpp"

namespace rftgp {

/// Net resistive force on the toe, world frame (z up).
struct ForceSample {
  double f_z = 0.0;
  double f_x = 0.0;
  int step = 0;
};

struct ForwardOptions {
  // Count only segments whose velocity pushes into the medium.
  bool leading_edge_only = false;
};

/// Resistive force theory sum: F = sum_m depth_m * area_m * alpha(beta_m,
/// gamma_m). Segments above the surface or without motion contribute nothing.
ForceSample forward_force(std::span<const SegmentState> states,
                          const StressField& field,
                          const ForwardOptions& options = {});
ForceSample forward_force(std::span<const SegmentState> states,
                          const GridStressMap& map,
                          const ForwardOptions& options = {});

std::vector<ForceSample> forward_forces(const SegmentStateSeries& series,
                                        const StressField& field,
                                        const ForwardOptions& options = {});

/// Multiplicative factor s ~ Normal(1, level) for one (seed, step, channel).
double noise_factor(std::uint64_t seed, int step, int channel, double level);

ForceSample inject_noise(const ForceSample& force, double level,
                         std::uint64_t seed);
Eigen::VectorXd inject_noise(const Eigen::VectorXd& observation, int step,
                             double level, std::uint64_t seed);

enum class ObservationMode { kForce, kTorque };

/// One composite observation: N channels, each a weighted sum of alpha_z and
/// alpha_x over the segments. mixing[m] (N x 2) maps the segment's
/// (w alpha_z, w alpha_x) contribution onto the channels; empty means the
/// force-mode identity (channel 0 = F_z, channel 1 = F_x).
struct CompositeStep {
  std::vector<Angles> angles;
  std::vector<double> weights;
  std::vector<Eigen::MatrixX2d> mixing;
  Eigen::VectorXd observation;
};

struct CompositeDataset {
  ObservationMode mode = ObservationMode::kForce;
  int channels = 2;
  double noise_variance = 0.0;
  std::vector<CompositeStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  Eigen::MatrixX2d mixing(std::size_t step, std::size_t segment) const;
};

/// Weight w = depth * area, zero for emerged or motionless segments.
double segment_weight(const SegmentState& s);

/// Force-mode dataset when jacobians is empty. Otherwise jacobians[i][m] is
/// the N x 2 map from segment m's (F_z, F_x) to the channels at step i.
CompositeDataset assemble_dataset(
    const SegmentStateSeries& series,
    const std::vector<Eigen::VectorXd>& observations, double noise_variance,
    const std::vector<std::vector<Eigen::MatrixX2d>>& jacobians = {});

std::vector<Eigen::VectorXd> force_observations(
    const std::vector<ForceSample>& forces);

/// Five-bar mounting used for torque-mode observations.
struct LegMount {
  Eigen::Vector2d hip = Eigen::Vector2d(0.0, 0.22);  // world (x, z)
  FiveBarParams params;
};

/// (F_z, F_x) world force on the toe -> joint torques at the leg's current
/// configuration: tau = J^T (F_x, -F_z).
Eigen::Matrix2d torque_mixing(const Eigen::Matrix2d& jacobian);

JointAngles leg_configuration(const Eigen::Vector2d& toe_world,
                              const LegMount& mount);

/// Point-contact torque mixing for every step of a series.
std::vector<std::vector<Eigen::MatrixX2d>> torque_jacobians(
    const SegmentStateSeries& series, const LegMount& mount,
    std::vector<JointAngles>* joint_angles = nullptr);

/// Baseline subtraction followed by a centered, edge-truncated moving average.
/// Trials are averaged sample-by-sample first.
std::vector<double> preprocess_force_log(
    const std::vector<std::vector<double>>& raw_trials,
    const std::vector<std::vector<double>>& baseline_trials, int window = 11);

struct ForceLog {
  std::vector<double> t;
  std::vector<double> f_x;
  std::vector<double> f_z;
};

struct TorqueLog {
  std::vector<double> t;
  std::vector<double> tau1;
  std::vector<double> tau2;
  std::vector<double> phi1;
  std::vector<double> phi2;
};

ForceLog read_force_log(const std::string& path);
std::string format_force_log(const ForceLog& log);
TorqueLog read_torque_log(const std::string& path);
std::string format_torque_log(const TorqueLog& log);

}  // namespace rftgp

#endif  // RFTGP_FORWARD_MODEL_HPP_
