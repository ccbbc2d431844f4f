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

#include "rftgp/forward_model.hpp"

#include <cmath>
#include <random>

#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"

namespace rftgp {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool contributes(const SegmentState& s, const ForwardOptions& options) {
  if (!s.submerged || !s.moving) return false;
  return !options.leading_edge_only || s.leading;
}

}  // namespace

ForceSample forward_force(std::span<const SegmentState> states,
                          const StressField& field,
                          const ForwardOptions& options) {
  ForceSample f;
  for (const auto& s : states) {
    if (!contributes(s, options)) continue;
    const StressValue alpha = field(s.beta, s.gamma);
    const double w = s.depth * s.area;
    f.f_z += w * alpha.z;
    f.f_x += w * alpha.x;
  }
  return f;
}

ForceSample forward_force(std::span<const SegmentState> states,
                          const GridStressMap& map,
                          const ForwardOptions& options) {
  return forward_force(
      states,
      StressField([&map](double b, double g) { return eval_map(map, b, g); }),
      options);
}

std::vector<ForceSample> forward_forces(const SegmentStateSeries& series,
                                        const StressField& field,
                                        const ForwardOptions& options) {
  std::vector<ForceSample> out;
  out.reserve(series.steps);
  for (int i = 0; i < series.steps; ++i) {
    std::span<const SegmentState> row(
        series.states.data() + static_cast<std::size_t>(i) * series.segments,
        series.segments);
    ForceSample f = forward_force(row, field, options);
    f.step = i;
    out.push_back(f);
  }
  return out;
}

double noise_factor(std::uint64_t seed, int step, int channel, double level) {
  if (!(level >= 0.0) || !std::isfinite(level)) {
    throw Error(ErrorCode::kInvalidSpec, "noise level must be non-negative");
  }
  if (level == 0.0) return 1.0;
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(step)));
  key = splitmix64(key ^ (static_cast<std::uint64_t>(channel) << 32));
  std::mt19937_64 rng(key);
  std::normal_distribution<double> normal(1.0, std::sqrt(level));
  return normal(rng);
}

ForceSample inject_noise(const ForceSample& force, double level,
                         std::uint64_t seed) {
  ForceSample out = force;
  out.f_z *= noise_factor(seed, force.step, 0, level);
  out.f_x *= noise_factor(seed, force.step, 1, level);
  return out;
}

Eigen::VectorXd inject_noise(const Eigen::VectorXd& observation, int step,
                             double level, std::uint64_t seed) {
  Eigen::VectorXd out = observation;
  for (Eigen::Index c = 0; c < out.size(); ++c) {
    out[c] *= noise_factor(seed, step, static_cast<int>(c), level);
  }
  return out;
}

Eigen::MatrixX2d CompositeDataset::mixing(std::size_t step,
                                          std::size_t segment) const {
  const auto& s = steps[step];
  if (s.mixing.empty()) return Eigen::MatrixX2d::Identity(2, 2);
  return s.mixing[segment];
}

double segment_weight(const SegmentState& s) {
  if (!s.submerged || !s.moving) return 0.0;
  return s.depth * s.area;
}

CompositeDataset assemble_dataset(
    const SegmentStateSeries& series,
    const std::vector<Eigen::VectorXd>& observations, double noise_variance,
    const std::vector<std::vector<Eigen::MatrixX2d>>& jacobians) {
  if (static_cast<int>(observations.size()) != series.steps) {
    throw Error(ErrorCode::kDimension,
                "observation count " + std::to_string(observations.size()) +
                    " does not match step count " +
                    std::to_string(series.steps));
  }
  const bool torque = !jacobians.empty();
  if (torque && static_cast<int>(jacobians.size()) != series.steps) {
    throw Error(ErrorCode::kDimension, "one Jacobian set per step required");
  }
  CompositeDataset data;
  data.mode = torque ? ObservationMode::kTorque : ObservationMode::kForce;
  data.noise_variance = noise_variance;
  data.channels = 2;
  if (torque && series.steps > 0 && !jacobians[0].empty()) {
    data.channels = static_cast<int>(jacobians[0][0].rows());
  }
  for (int i = 0; i < series.steps; ++i) {
    CompositeStep step;
    for (int m = 0; m < series.segments; ++m) {
      const auto& s = series.at(i, m);
      step.angles.emplace_back(s.beta, s.gamma);
      step.weights.push_back(segment_weight(s));
    }
    if (torque) {
      if (static_cast<int>(jacobians[i].size()) != series.segments) {
        throw Error(ErrorCode::kDimension, "one Jacobian per segment required");
      }
      for (const auto& j : jacobians[i]) {
        if (j.rows() != data.channels) {
          throw Error(ErrorCode::kDimension, "inconsistent channel count");
        }
      }
      step.mixing = jacobians[i];
    }
    if (observations[i].size() != data.channels) {
      throw Error(ErrorCode::kDimension,
                  "observation at step " + std::to_string(i) + " has " +
                      std::to_string(observations[i].size()) + " channels");
    }
    step.observation = observations[i];
    data.steps.push_back(std::move(step));
  }
  return data;
}

std::vector<Eigen::VectorXd> force_observations(
    const std::vector<ForceSample>& forces) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(forces.size());
  for (const auto& f : forces) out.push_back(Eigen::Vector2d(f.f_z, f.f_x));
  return out;
}

Eigen::Matrix2d torque_mixing(const Eigen::Matrix2d& jacobian) {
  Eigen::Matrix2d world_to_leg;
  world_to_leg << 0.0, 1.0,
                  -1.0, 0.0;
  return jacobian.transpose() * world_to_leg;
}

JointAngles leg_configuration(const Eigen::Vector2d& toe_world,
                              const LegMount& mount) {
  const Eigen::Vector2d leg(toe_world.x() - mount.hip.x(),
                            mount.hip.y() - toe_world.y());
  return fivebar_inverse(leg, mount.params);
}

std::vector<std::vector<Eigen::MatrixX2d>> torque_jacobians(
    const SegmentStateSeries& series, const LegMount& mount,
    std::vector<JointAngles>* joint_angles) {
  std::vector<std::vector<Eigen::MatrixX2d>> out;
  out.reserve(series.steps);
  for (int i = 0; i < series.steps; ++i) {
    const JointAngles q = leg_configuration(series.reference_positions[i], mount);
    if (joint_angles) joint_angles->push_back(q);
    const Eigen::MatrixX2d mix = torque_mixing(fivebar_jacobian(q, mount.params));
    out.emplace_back(series.segments, mix);
  }
  return out;
}

std::vector<double> preprocess_force_log(
    const std::vector<std::vector<double>>& raw_trials,
    const std::vector<std::vector<double>>& baseline_trials, int window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kInvalidSpec, "moving-average window must be odd and >= 1");
  }
  if (raw_trials.empty() || baseline_trials.empty()) {
    throw Error(ErrorCode::kDimension, "force log needs at least one trial");
  }
  const std::size_t n = raw_trials.front().size();
  auto average = [n](const std::vector<std::vector<double>>& trials) {
    std::vector<double> mean(n, 0.0);
    for (const auto& trial : trials) {
      if (trial.size() != n) {
        throw Error(ErrorCode::kDimension, "force log length mismatch");
      }
      for (std::size_t k = 0; k < n; ++k) mean[k] += trial[k];
    }
    for (double& v : mean) v /= static_cast<double>(trials.size());
    return mean;
  };
  const std::vector<double> raw = average(raw_trials);
  const std::vector<double> base = average(baseline_trials);
  std::vector<double> diff(n);
  for (std::size_t k = 0; k < n; ++k) diff[k] = raw[k] - base[k];

  const auto half = static_cast<std::ptrdiff_t>(window / 2);
  const auto len = static_cast<std::ptrdiff_t>(n);
  std::vector<double> out(n);
  for (std::ptrdiff_t k = 0; k < len; ++k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, k + half);
    double sum = 0.0;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += diff[j];
    out[k] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

ForceLog read_force_log(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  return {table.column("t_s"), table.column("f_x_N"), table.column("f_z_N")};
}

std::string format_force_log(const ForceLog& log) {
  std::string out = "t_s,f_x_N,f_z_N\n";
  for (std::size_t k = 0; k < log.t.size(); ++k) {
    out += format_double(log.t[k]) + ',' + format_double(log.f_x[k]) + ',' +
           format_double(log.f_z[k]) + '\n';
  }
  return out;
}

TorqueLog read_torque_log(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  return {table.column("t_s"), table.column("tau1_Nm"), table.column("tau2_Nm"),
          table.column("phi1_rad"), table.column("phi2_rad")};
}

std::string format_torque_log(const TorqueLog& log) {
  std::string out = "t_s,tau1_Nm,tau2_Nm,phi1_rad,phi2_rad\n";
  for (std::size_t k = 0; k < log.t.size(); ++k) {
    out += format_double(log.t[k]) + ',' + format_double(log.tau1[k]) + ',' +
           format_double(log.tau2[k]) + ',' + format_double(log.phi1[k]) + ',' +
           format_double(log.phi2[k]) + '\n';
  }
  return out;
}

}  // namespace rftgp
