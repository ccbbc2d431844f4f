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


#ifndef RFTGP_WORKBENCH_HPP_
#define RFTGP_WORKBENCH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rftgp/config.hpp"
#include "rftgp/evaluation.hpp"
#include "rftgp/forward_model.hpp"
#include "rftgp/geometry.hpp"
#include "rftgp/inverse_gp.hpp"
#include "rftgp/stress_field.hpp"

namespace rftgp {

/// Everything the synthetic forward pass produces for one config.
struct Simulation {
  SegmentStateSeries series;
  GridStressMap truth;                 // on the ground-truth grid
  std::vector<ForceSample> forces;     // noise-free
  std::vector<Eigen::VectorXd> observations;  // with noise, per step
  std::vector<JointAngles> joints;     // torque mode only
  CompositeDataset dataset;
};

Simulation simulate_config(const ExperimentConfig& config);

/// Ground truth named by the config, on its own grid.
GridStressMap load_truth(const ExperimentConfig& config);

/// Resamples a map onto new axes. Matching axes reproduce the values exactly.
GridStressMap resample(const GridStressMap& map, const GridAxes& axes);

/// Versioned record of a fitted model: key = value header lines followed by
/// the posterior mean and variance grids in the stress-map format.
struct ModelRecord {
  int format_version = 1;
  std::string config_digest;
  std::string dataset_digest;
  ObservationMode mode = ObservationMode::kForce;
  Hyperparameters hyperparameters;
  double log_likelihood = 0.0;
  double jitter = 0.0;
  std::optional<ScalingFit> scaling;
  std::optional<GridStressMap> posterior_mean;
  std::optional<GridStressMap> posterior_variance;
};

std::string format_model_record(const ModelRecord& record);
ModelRecord parse_model_record(const std::string& text, const std::string& origin);

struct RunArtifacts {
  std::string directory;
  std::string config_digest;
  std::string dataset_digest;
  std::vector<std::string> files;  // written, relative to directory
  std::optional<MetricsReport> metrics;         // full grid
  std::optional<MetricsReport> masked_metrics;  // sampled region
  SamplingDiagnostics diagnostics;
  std::optional<ModelRecord> model;
  std::vector<std::string> warnings;
};

/// Forward pass only: segment states, observations and truth.
RunArtifacts simulate(const ExperimentConfig& config);

/// Fit and reconstruct from the measured logs listed in the config.
RunArtifacts invert(const ExperimentConfig& config);

/// Geometry, forward model, noise, fit, posterior grid and metrics. On
/// failure a FAILED marker names the stage and the artifacts written so far
/// are kept.
RunArtifacts run_experiment(const ExperimentConfig& config);

struct SweepCell {
  double level = 0.0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

struct SweepAggregate {
  double level = 0.0;
  int runs = 0;
  MetricsReport mean;
  MetricsReport stddev;  // sample standard deviation, 0 for a single run
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (level, seed) as given
  std::vector<SweepAggregate> aggregates;
};

/// One run per (level, seed) under output_dir/level<i>_seed<s>, then
/// sweep.csv and sweep_summary.csv in output_dir.
SweepResult sweep_noise(const ExperimentConfig& config,
                        const std::vector<double>& levels,
                        const std::vector<std::uint64_t>& seeds);

struct CompareRow {
  std::string name;
  std::string config_digest;
  MetricsReport metrics;
};

/// Runs each config under output_dir/<name> and ranks by z-axis RMSE
/// (ties keep input order). Writes compare.csv to output_dir.
std::vector<CompareRow> compare_configs(const std::vector<ExperimentConfig>& configs,
                                        const std::string& output_dir);

std::string format_compare_table(const std::vector<CompareRow>& rows);

}  // namespace rftgp

#endif  // RFTGP_WORKBENCH_HPP_
