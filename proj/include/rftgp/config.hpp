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


#ifndef RFTGP_CONFIG_HPP_
#define RFTGP_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rftgp/fivebar.hpp"
#include "rftgp/forward_model.hpp"
#include "rftgp/geometry.hpp"
#include "rftgp/inverse_gp.hpp"
#include "rftgp/kernel.hpp"

namespace rftgp {

enum class TruthSource { kPrior, kFile, kScaledBase };

struct TruthConfig {
  TruthSource source = TruthSource::kPrior;
  std::uint64_t seed = 1;
  KernelConfig prior;               // kernel used for prior draws
  int beta_nodes = 37;              // grid the prior draw lives on
  int gamma_nodes = 37;
  std::string path;                 // map file for kFile / base for kScaledBase
  double zeta_z = 1.0;
  double zeta_x = 1.0;
};

struct ObservationConfig {
  ObservationMode mode = ObservationMode::kForce;
  bool leading_edge_only = false;
  std::optional<Eigen::Vector2d> hip;  // torque mode; automatic when unset
  FiveBarParams leg;
  // Measured logs for `invert`. Each trial is one CSV; trials are averaged.
  std::vector<std::string> trials;
  std::vector<std::string> baseline_trials;
  int smoothing_window = 1;
};

struct NoiseConfig {
  double level = 0.0;
  std::uint64_t seed = 1;
};

struct InferenceConfig {
  int restarts = 3;
  std::uint64_t seed = 0;
  bool shared_kernels = false;
  int max_iterations = 100;
  std::optional<Hyperparameters> initial;
  std::optional<HyperBounds> bounds;
  // Semi-parametric mode: fit zeta * base, then a GP on the residual.
  std::string base_map;
};

struct MetricsConfig {
  double mask_radius = 0.0872664625997164788;  // one 5 degree grid step
  double angle_quantum = 0.0174532925199432958;
  double coverage_bin = 0.0872664625997164788;
};

struct SweepConfig {
  std::vector<double> levels = {0.0, 0.05, 0.2};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
};

struct ExperimentConfig {
  std::string name = "experiment";
  ToeSpec toe;
  TrajectorySpec trajectory;
  double surface_height = 0.0;
  TruthConfig truth;
  ObservationConfig observation;
  NoiseConfig noise;
  InferenceConfig inference;
  int grid_beta_nodes = 37;
  int grid_gamma_nodes = 37;
  MetricsConfig metrics;
  SweepConfig sweep;
  std::string output_dir = "runs/experiment";
};

/// Parses the JSON config. Unknown keys, wrong types and out-of-range values
/// throw Error(kConfig); `origin` names the source in messages.
ExperimentConfig parse_config(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);

/// Every field written out, defaults included. Parsing the result yields an
/// identical config.
std::string dump_config(const ExperimentConfig& config);

/// Range and file-existence checks. Throws Error(kConfig).
void validate(const ExperimentConfig& config);

/// FNV-1a over the normalized config with the output directory left out,
/// as 16 hex digits.
std::string config_digest(const ExperimentConfig& config);

/// The four reference setups: i_toe_gait1, i_toe_gait2, c_toe_gait1,
/// c_toe_gait2. Gait 1 is the rectangle, gait 2 the cubic spline.
std::vector<ExperimentConfig> reference_configs();
ExperimentConfig reference_config(const std::string& name);

}  // namespace rftgp

#endif  // RFTGP_CONFIG_HPP_
