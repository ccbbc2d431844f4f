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

#include "rftgp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rftgp/error.hpp"

namespace rftgp {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Coordinates pinned at a bound by an outward-pointing ascent gradient.
Eigen::Array<bool, Eigen::Dynamic, 1> pinned(const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& g,
                                             const Eigen::VectorXd& lo,
                                             const Eigen::VectorXd& hi) {
  Eigen::Array<bool, Eigen::Dynamic, 1> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = (x[i] <= lo[i] && g[i] < 0.0) || (x[i] >= hi[i] && g[i] > 0.0);
  }
  return out;
}

}  // namespace

BoxOptimizerResult maximize_in_box(const Objective& objective,
                                   const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper,
                                   const BoxOptimizerOptions& options) {
  const Eigen::Index n = start.size();
  BoxOptimizerResult result;
  result.x = project(start, lower, upper);

  auto evaluate = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    ++result.evaluations;
    try {
      const double v = objective(x, g);
      if (std::isfinite(v) && (!g || g->allFinite())) return v;
    } catch (const Error&) {
    }
    return -std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd g(n);
  double f = evaluate(result.x, &g);
  if (!std::isfinite(f)) {
    throw Error(ErrorCode::kNumerical, "objective undefined at the start point");
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);  // inverse Hessian of -f
  int stalled = 0;
  bool first_update = true;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const auto fixed = pinned(result.x, g, lower, upper);
    Eigen::VectorXd free_g = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fixed[i]) free_g[i] = 0.0;
    }
    if (free_g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd d = h * free_g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (fixed[i]) d[i] = 0.0;
    }
    if (!(d.dot(free_g) > 0.0)) {
      h.setIdentity();
      first_update = true;
      d = free_g;
    }
    const double largest = d.lpNorm<Eigen::Infinity>();
    double step = largest > options.max_step ? options.max_step / largest : 1.0;

    Eigen::VectorXd x_new;
    Eigen::VectorXd g_new(n);
    double f_new = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 20; ++ls) {
      x_new = project(result.x + step * d, lower, upper);
      const double gain = g.dot(x_new - result.x);
      f_new = evaluate(x_new, nullptr);
      if (std::isfinite(f_new) && f_new >= f + 1e-4 * gain) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (accepted) {
      f_new = evaluate(x_new, &g_new);
      accepted = std::isfinite(f_new);
    }
    if (!accepted) {
      if (h.isIdentity()) break;
      h.setIdentity();
      first_update = true;
      continue;
    }

    const Eigen::VectorXd s = x_new - result.x;
    const Eigen::VectorXd y = g - g_new;  // gradient change of -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first_update) {
        h *= sy / y.squaredNorm();
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }

    const double change = std::abs(f_new - f);
    result.x = x_new;
    g = g_new;
    f = f_new;
    if (change <= options.value_tolerance * std::max(1.0, std::abs(f))) {
      if (++stalled >= 3) {
        result.converged = true;
        break;
      }
    } else {
      stalled = 0;
    }
  }
  result.value = f;
  return result;
}

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace rftgp
