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


#include <cmath>

#include <doctest.h>

#include "rftgp/error.hpp"
#include "rftgp/optimizer.hpp"

using namespace rftgp;
using doctest::Approx;

TEST_CASE("concave quadratic reaches its interior maximum") {
  const Eigen::Vector3d peak(0.5, -1.0, 2.0);
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const Eigen::VectorXd d = x - peak;
    if (g) *g = -2.0 * d;
    return -d.squaredNorm();
  };
  const Eigen::VectorXd lo = Eigen::Vector3d::Constant(-5.0);
  const Eigen::VectorXd hi = Eigen::Vector3d::Constant(5.0);
  const BoxOptimizerResult r = maximize_in_box(f, Eigen::Vector3d::Zero(), lo, hi);
  CHECK(r.converged);
  CHECK((r.x - peak).norm() <= 1e-6);
  CHECK(r.value == Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("bound constraints become active when the peak lies outside") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = Eigen::Vector2d(1.0, -2.0 * (x[1] - 0.3));
    return x[0] - (x[1] - 0.3) * (x[1] - 0.3);
  };
  const BoxOptimizerResult r =
      maximize_in_box(f, Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(-1.0, -1.0),
                      Eigen::Vector2d(1.5, 1.0));
  CHECK(r.x[0] == 1.5);
  CHECK(r.x[1] == Approx(0.3).epsilon(1e-6));
}

TEST_CASE("Rosenbrock valley") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    if (g) *g = -Eigen::Vector2d(-2.0 * a - 400.0 * x[0] * b, 200.0 * b);
    return -(a * a + 100.0 * b * b);
  };
  BoxOptimizerOptions opt;
  opt.max_iterations = 500;
  const BoxOptimizerResult r =
      maximize_in_box(f, Eigen::Vector2d(-1.2, 1.0), Eigen::Vector2d(-2.0, -2.0),
                      Eigen::Vector2d(2.0, 2.0), opt);
  CHECK((r.x - Eigen::Vector2d(1.0, 1.0)).norm() <= 1e-3);
}

TEST_CASE("iterates never leave the box and start is projected") {
  const Eigen::Vector2d lo(-1.0, 0.0);
  const Eigen::Vector2d hi(1.0, 2.0);
  bool inside = true;
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    inside = inside && (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    if (g) *g = Eigen::Vector2d(std::cos(3 * x[0]), -x[1]);
    return std::sin(3 * x[0]) / 3 - 0.5 * x[1] * x[1];
  };
  const BoxOptimizerResult r = maximize_in_box(f, Eigen::Vector2d(5.0, -3.0), lo, hi);
  CHECK(inside);
  CHECK(r.evaluations > 0);
  CHECK(r.iterations <= BoxOptimizerOptions{}.max_iterations);
}

TEST_CASE("an objective that throws is treated as infeasible") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (x[0] > 0.5) throw Error(ErrorCode::kNumerical, "outside the domain");
    if (g) *g = Eigen::VectorXd::Constant(1, 1.0);
    return x[0];
  };
  const BoxOptimizerResult r = maximize_in_box(f, Eigen::VectorXd::Constant(1, 0.0),
                                               Eigen::VectorXd::Constant(1, -1.0),
                                               Eigen::VectorXd::Constant(1, 1.0));
  CHECK(r.x[0] <= 0.5);
  CHECK(r.x[0] >= 0.0);
}

TEST_CASE("central-difference gradient") {
  const auto f = [](const Eigen::VectorXd& x) { return std::exp(x[0]) * std::sin(x[1]); };
  const Eigen::Vector2d x(0.3, 1.1);
  const Eigen::VectorXd g = finite_difference_gradient(f, x);
  CHECK(g[0] == Approx(std::exp(0.3) * std::sin(1.1)).epsilon(1e-8));
  CHECK(g[1] == Approx(std::exp(0.3) * std::cos(1.1)).epsilon(1e-8));
}
