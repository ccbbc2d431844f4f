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

#include "rftgp/cholesky.hpp"

#include <cmath>

#include "rftgp/error.hpp"

namespace rftgp {

JitteredCholesky factorize_with_jitter(const Eigen::MatrixXd& c) {
  JitteredCholesky out;
  const auto dim = c.rows();
  if (dim == 0) return out;
  if (!c.allFinite()) {
    throw Error(ErrorCode::kNumerical, "covariance has non-finite entries");
  }
  double scale = c.trace() / static_cast<double>(dim);
  if (!(scale > 0.0)) scale = 1.0;
  const double floor = 1e-10 * scale;
  out.llt.compute(c);
  if (out.llt.info() == Eigen::Success &&
      out.llt.matrixLLT().diagonal().array().square().minCoeff() >= floor) {
    return out;
  }
  Eigen::MatrixXd work;
  for (double rel = 1e-10; rel <= 1e-4 * (1.0 + 1e-9); rel *= 10.0) {
    const double jitter = rel * scale;
    work = c;
    work.diagonal().array() += jitter;
    out.llt.compute(work);
    if (out.llt.info() == Eigen::Success &&
        (out.llt.matrixLLT().diagonal().array() > 0.0).all()) {
      out.jitter = jitter;
      return out;
    }
  }
  throw Error(ErrorCode::kNumerical,
              "covariance not positive definite after jitter escalation "
              "(dim " + std::to_string(dim) + ")");
}

}  // namespace rftgp
