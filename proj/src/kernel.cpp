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

#include "rftgp/kernel.hpp"

#include <cmath>

#include "rftgp/error.hpp"

namespace rftgp {

void validate(const KernelConfig& config) {
  if (!(config.signal_variance >= 0.0) ||
      !std::isfinite(config.signal_variance)) {
    throw Error(ErrorCode::kInvalidSpec,
                "kernel signal variance must be finite and non-negative");
  }
  for (double l : config.lengthscales) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      throw Error(ErrorCode::kInvalidSpec,
                  "kernel lengthscales must be finite and positive");
    }
  }
}

Eigen::Vector4d embed(const Angles& theta) {
  return {std::sin(2.0 * theta.x()), std::cos(2.0 * theta.x()),
          std::sin(theta.y()), std::cos(theta.y())};
}

double kernel_eval(const Angles& a, const Angles& b,
                   const KernelConfig& config) {
  const Eigen::Vector4d fa = embed(a);
  const Eigen::Vector4d fb = embed(b);
  double r2 = 0.0;
  for (int d = 0; d < 4; ++d) {
    const double diff = (fa[d] - fb[d]) / config.lengthscales[d];
    r2 += diff * diff;
  }
  return config.signal_variance * std::exp(-0.5 * r2);
}

Eigen::MatrixX4d embed_all(const std::vector<Angles>& thetas) {
  Eigen::MatrixX4d out(static_cast<Eigen::Index>(thetas.size()), 4);
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = embed(thetas[i]).transpose();
  }
  return out;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixX4d& a,
                              const Eigen::MatrixX4d& b,
                              const KernelConfig& config) {
  Eigen::Array4d inv_l;
  for (int d = 0; d < 4; ++d) inv_l[d] = 1.0 / config.lengthscales[d];
  const Eigen::MatrixX4d sa = a * inv_l.matrix().asDiagonal();
  const Eigen::MatrixX4d sb = b * inv_l.matrix().asDiagonal();
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double r2 = (sa.row(i) - sb.row(j)).squaredNorm();
      out(i, j) = config.signal_variance * std::exp(-0.5 * r2);
    }
  }
  return out;
}

}  // namespace rftgp
