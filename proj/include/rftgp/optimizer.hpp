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

#ifndef RFTGP_OPTIMIZER_HPP_
#define RFTGP_OPTIMIZER_HPP_

#include <functional>

#include <Eigen/Core>

namespace rftgp {

/// Objective returning f(x); fills *gradient when non-null. May throw, in
/// which case the point is treated as infeasible.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct BoxOptimizerOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;   // projected gradient, inf-norm
  double value_tolerance = 1e-9;      // relative change in f
  double max_step = 2.0;              // per-coordinate cap on the first trial step
};

struct BoxOptimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Maximizes f over the box [lower, upper] with projected BFGS and an
/// Armijo backtracking line search.
BoxOptimizerResult maximize_in_box(const Objective& objective,
                                   const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   const BoxOptimizerOptions& options = {});

/// Central-difference gradient with step h.
Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-5);

}  // namespace rftgp

#endif  // RFTGP_OPTIMIZER_HPP_
