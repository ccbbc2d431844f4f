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

#ifndef RFTGP_CHOLESKY_HPP_
#define RFTGP_CHOLESKY_HPP_

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace rftgp {

struct JitteredCholesky {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // diagonal term that made the factorization succeed
};

/// Cholesky of c + jitter * I. The plain factorization is kept when every
/// squared pivot is at least 1e-10 * trace(c) / dim. Otherwise jitter starts
/// at that level and grows by 10x up to 1e-4 * trace(c) / dim; beyond that
/// throws kNumerical.
JitteredCholesky factorize_with_jitter(const Eigen::MatrixXd& c);

}  // namespace rftgp

#endif  // RFTGP_CHOLESKY_HPP_
