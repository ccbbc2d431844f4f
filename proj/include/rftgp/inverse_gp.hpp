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

#ifndef RFTGP_INVERSE_GP_HPP_
#define RFTGP_INVERSE_GP_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rftgp/cholesky.hpp"
#include "rftgp/forward_model.hpp"
#include "rftgp/kernel.hpp"
#include "rftgp/stress_field.hpp"

namespace rftgp {

enum class Component { kZ, kX };

struct Hyperparameters {
  KernelConfig kernel_z;
  KernelConfig kernel_x;
  double noise_variance = 1e-4;
};

void validate(const Hyperparameters& hyper);

/// The linear map from latent stress values to composite observations.
/// Latent points are the (step, segment) pairs with non-zero weight; row
/// step * N + c of W_z / W_x holds the weights that channel c applies to
/// alpha_z / alpha_x at each latent point.
class CompositeOperator {
 public:
  explicit CompositeOperator(const CompositeDataset& data);

  Eigen::Index observation_count() const { return observations_.size(); }
  Eigen::Index latent_count() const { return features_.rows(); }
  int channels() const { return channels_; }

  const std::vector<Angles>& points() const { return points_; }
  const Eigen::MatrixX4d& features() const { return features_; }
  const Eigen::SparseMatrix<double>& weights(Component c) const {
    return c == Component::kZ ? w_z_ : w_x_;
  }
  const Eigen::VectorXd& observations() const { return observations_; }

 private:
  int channels_ = 2;
  std::vector<Angles> points_;
  Eigen::MatrixX4d features_;
  Eigen::SparseMatrix<double> w_z_;
  Eigen::SparseMatrix<double> w_x_;
  Eigen::VectorXd observations_;
};

/// C = W_z K_z W_z^T + W_x K_x W_x^T + noise * I, exactly symmetric.
Eigen::MatrixXd assemble_covariance(const CompositeOperator& op,
                                    const Hyperparameters& hyper);
Eigen::MatrixXd assemble_covariance(const CompositeDataset& data,
                                    const Hyperparameters& hyper);

struct StressPosterior {
  double mean = 0.0;
  double variance = 0.0;
  bool floored = false;  // variance clipped at zero
};

struct ForcePosterior {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();      // (F_z, F_x)
  Eigen::Vector2d variance = Eigen::Vector2d::Zero();
};

struct PosteriorGrid {
  GridStressMap mean;
  Eigen::MatrixXd variance_z;
  Eigen::MatrixXd variance_x;
  int floored_nodes = 0;
};

/// Factorized composite-observation GP. Immutable after construction, so
/// concurrent posterior queries are safe.
class GpModel {
 public:
  GpModel(const CompositeDataset& data, const Hyperparameters& hyper);
  GpModel(std::shared_ptr<const CompositeOperator> op,
          const Hyperparameters& hyper);

  const Hyperparameters& hyperparameters() const { return hyper_; }
  const CompositeOperator& composite() const { return *op_; }
  double jitter() const { return chol_.jitter; }

  /// C^{-1} F, the cached solve.
  const Eigen::VectorXd& solved() const { return solved_; }
  /// Relative residual |C s - F| / |F| of the cached solve.
  double solve_residual() const;

  StressPosterior posterior_stress(const Angles& theta, Component c) const;
  PosteriorGrid posterior_stress_grid(const GridAxes& axes) const;
  ForcePosterior posterior_force(const std::vector<Angles>& angles,
                                 const std::vector<double>& weights) const;
  double log_marginal_likelihood() const;

 private:
  void factorize();
  const KernelConfig& kernel(Component c) const {
    return c == Component::kZ ? hyper_.kernel_z : hyper_.kernel_x;
  }

  std::shared_ptr<const CompositeOperator> op_;
  Hyperparameters hyper_;
  Eigen::MatrixXd covariance_;
  JitteredCholesky chol_;
  Eigen::VectorXd solved_;
  Eigen::VectorXd projected_z_;  // W_z^T C^{-1} F
  Eigen::VectorXd projected_x_;
};

/// Log-space parameter vector. Independent kernels:
/// [log sf2_z, log l_z(4), log sf2_x, log l_x(4), log noise] (11 entries);
/// shared kernels: [log sf2, log l(4), log noise] (6 entries).
Eigen::VectorXd pack_log_parameters(const Hyperparameters& hyper, bool shared);
Hyperparameters unpack_log_parameters(const Eigen::VectorXd& p, bool shared);

struct LikelihoodValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // w.r.t. the packed log parameters
};

/// -1/2 F^T C^{-1} F - 1/2 log|C| - (t N / 2) log(2 pi).
double log_marginal_likelihood(const CompositeDataset& data,
                               const Hyperparameters& hyper);

/// Reusable evaluator for the likelihood and its analytic gradient.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(std::shared_ptr<const CompositeOperator> op, bool shared);

  LikelihoodValue evaluate(const Hyperparameters& hyper,
                           bool with_gradient = true) const;
  const CompositeOperator& composite() const { return *op_; }

 private:
  std::shared_ptr<const CompositeOperator> op_;
  bool shared_;
};

struct HyperBounds {
  double signal_lower = 1e-4;
  double signal_upper = 1e4;
  double length_lower = 0.05;
  double length_upper = 10.0;
  double noise_lower = 1e-10;
  double noise_upper = 1.0;
};

/// Bounds scaled to the data: signal variance by the stress scale squared,
/// noise by the observation scale squared.
HyperBounds default_bounds(const CompositeDataset& data);

/// Starting point matching default_bounds: signal = stress scale^2,
/// lengthscales 1, noise = 1e-4 * observation scale^2.
Hyperparameters default_initial(const CompositeDataset& data);

struct FitOptions {
  std::optional<HyperBounds> bounds;
  int restarts = 3;
  std::uint64_t seed = 0;
  bool shared_hyperparameters = false;
  bool analytic_gradient = true;
  int max_iterations = 100;
};

struct FitResult {
  std::shared_ptr<const GpModel> model;
  Hyperparameters hyperparameters;
  double log_likelihood = 0.0;
  int best_restart = 0;
  std::vector<double> restart_likelihoods;  // -inf for failed restarts
  int iterations = 0;   // summed over restarts
  int evaluations = 0;
};

/// Maximizes the log marginal likelihood in log-parameter space from the
/// initial point plus (restarts - 1) seeded lattice starts.
FitResult fit_hyperparameters(const CompositeDataset& data,
                              const Hyperparameters& init,
                              const FitOptions& options = {});

struct ScalingFit {
  double zeta_z = 1.0;
  double zeta_x = 1.0;
};

/// Observations predicted by zeta_z * base_z + zeta_x * base_x; the two
/// columns of the returned (tN x 2) design hold the unit-zeta predictions.
Eigen::MatrixX2d base_design(const CompositeDataset& data,
                             const GridStressMap& base);

/// Least-squares scaling factors. Throws kDegenerateFit on a rank-deficient
/// design.
ScalingFit fit_scaling(const CompositeDataset& data, const GridStressMap& base);

/// zeta * base plus a GP residual fitted to y = observations - base(zeta).
class SemiParametricModel {
 public:
  SemiParametricModel(GridStressMap base, ScalingFit zeta, FitResult residual);

  const ScalingFit& scaling() const { return zeta_; }
  const FitResult& residual_fit() const { return residual_; }
  const GpModel& residual() const { return *residual_.model; }

  StressPosterior posterior_stress(const Angles& theta, Component c) const;
  PosteriorGrid posterior_stress_grid(const GridAxes& axes) const;
  /// Residual posterior alone.
  PosteriorGrid residual_grid(const GridAxes& axes) const;

 private:
  GridStressMap base_;
  ScalingFit zeta_;
  FitResult residual_;
};

/// Dataset with observations replaced by observations - base(zeta).
CompositeDataset residual_dataset(const CompositeDataset& data,
                                  const GridStressMap& base,
                                  const ScalingFit& zeta);

SemiParametricModel fit_residual(const CompositeDataset& data,
                                 const GridStressMap& base,
                                 const ScalingFit& zeta,
                                 const Hyperparameters& init,
                                 const FitOptions& options = {});

/// FNV-1a digest over the dataset's numeric content.
std::uint64_t dataset_digest(const CompositeDataset& data);

}  // namespace rftgp

#endif  // RFTGP_INVERSE_GP_HPP_
