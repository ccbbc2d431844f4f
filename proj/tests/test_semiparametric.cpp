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
#include <numbers>

#include <doctest.h>

#include "rftgp/error.hpp"
#include "rftgp/evaluation.hpp"
#include "rftgp/inverse_gp.hpp"

using namespace rftgp;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

TrajectorySpec cubic_gait() {
  TrajectorySpec t;
  t.kind = TrajectoryKind::kCubicSpline;
  t.spline.control_points = {{-0.2, 0.0}, {-0.1, -0.05}, {0.1, 0.0}, {0.2, -0.05}};
  return t;
}

SegmentStateSeries c_toe_cubic() {
  return segment_states(make_toe(ToeSpec{}), make_trajectory(cubic_gait()));
}

GridStressMap base_profile() {
  KernelConfig k;
  k.signal_variance = 4.0;
  k.lengthscales = {1.5, 1.5, 1.5, 1.5};
  return sample_prior_map(k, k, 21, uniform_axes());
}

CompositeDataset observe(const SegmentStateSeries& series, const GridStressMap& truth,
                         double level = 0.0, std::uint64_t seed = 0) {
  std::vector<Eigen::VectorXd> obs;
  for (const auto& f : forward_forces(series, as_field(truth))) {
    obs.push_back(Eigen::Vector2d(f.f_z, f.f_x));
  }
  for (std::size_t i = 0; i < obs.size(); ++i) {
    obs[i] = inject_noise(obs[i], static_cast<int>(i), level, seed);
  }
  return assemble_dataset(series, obs, 0.0);
}

double rmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("scaling factors are recovered exactly from noise-free data") {
  const GridStressMap base = base_profile();
  const CompositeDataset d = observe(c_toe_cubic(), scale_map(base, 1.5, 1.0));
  const ScalingFit z = fit_scaling(d, base);
  CHECK(std::abs(z.zeta_z - 1.5) <= 1e-10);
  CHECK(std::abs(z.zeta_x - 1.0) <= 1e-10);
}

TEST_CASE("zero observations give zero scaling") {
  const GridStressMap base = base_profile();
  CompositeDataset d = observe(c_toe_cubic(), base);
  for (auto& s : d.steps) s.observation.setZero();
  const ScalingFit z = fit_scaling(d, base);
  CHECK(z.zeta_z == 0.0);
  CHECK(z.zeta_x == 0.0);
}

TEST_CASE("noisy scaling estimates average to the truth") {
  const GridStressMap base = base_profile();
  const SegmentStateSeries series = c_toe_cubic();
  const GridStressMap truth = scale_map(base, 1.5, 1.0);
  double sz = 0.0;
  double sx = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ScalingFit z = fit_scaling(observe(series, truth, 0.05, seed), base);
    sz += z.zeta_z;
    sx += z.zeta_x;
  }
  CHECK(std::abs(sz / 10 - 1.5) <= 0.02 * 1.5);
  CHECK(std::abs(sx / 10 - 1.0) <= 0.02 * 1.0);
}

TEST_CASE("an all-zero base profile is a degenerate scaling fit") {
  GridStressMap base = base_profile();
  const CompositeDataset d = observe(c_toe_cubic(), base);
  base.values_z.setZero();
  try {
    fit_scaling(d, base);
    FAIL("expected a degenerate-fit error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateFit);
  }
  CHECK_THROWS_AS(fit_scaling(CompositeDataset{}, base_profile()), Error);
}

TEST_CASE("residual observations subtract the scaled base prediction") {
  const GridStressMap base = base_profile();
  const CompositeDataset d = observe(c_toe_cubic(), scale_map(base, 1.5, 1.0));
  const CompositeDataset r = residual_dataset(d, base, {1.5, 1.0});
  for (std::size_t p = 0; p < r.size(); ++p) {
    CHECK(r.steps[p].observation.norm() <= 1e-12 * (1.0 + d.steps[p].observation.norm()));
    CHECK(r.steps[p].weights == d.steps[p].weights);
  }
}

TEST_CASE("exactly scaled truth leaves a residual posterior near zero") {
  const GridStressMap base = base_profile();
  const CompositeDataset d = observe(c_toe_cubic(), scale_map(base, 1.5, 1.0));
  const ScalingFit z = fit_scaling(d, base);
  FitOptions opt;
  opt.restarts = 1;
  opt.bounds = default_bounds(d);
  const SemiParametricModel model = fit_residual(d, base, z, default_initial(d), opt);
  const PosteriorGrid g = model.residual_grid(uniform_axes());
  for (Eigen::Index i = 0; i < g.mean.values_z.size(); ++i) {
    CHECK(std::abs(g.mean.values_z(i)) <= 3.0 * std::sqrt(g.variance_z(i)) + 1e-12);
    CHECK(std::abs(g.mean.values_x(i)) <= 3.0 * std::sqrt(g.variance_x(i)) + 1e-12);
  }
  const StressPosterior p = model.posterior_stress({0.2, 0.3}, Component::kZ);
  const StressPosterior r = model.residual().posterior_stress({0.2, 0.3}, Component::kZ);
  CHECK(p.mean == Approx(r.mean + z.zeta_z * eval_map(base, 0.2, 0.3).z));
  CHECK(p.variance == r.variance);
}

TEST_CASE("residual GP recovers a localized bump on the sampled region") {
  const GridStressMap base = base_profile();
  const GridAxes axes = uniform_axes();
  GridStressMap bump = base;
  for (std::size_t i = 0; i < axes.beta.size(); ++i) {
    for (std::size_t j = 0; j < axes.gamma.size(); ++j) {
      const double sb = std::sin(axes.beta[i] - 0.3);
      const double dg = axes.gamma[j] - 0.6;
      const double v = 2.0 * std::exp(-sb * sb / (2 * 0.5 * 0.5) - dg * dg / (2 * 0.6 * 0.6));
      bump.values_z(i, j) = v;
      bump.values_x(i, j) = -0.5 * v;
    }
  }
  GridStressMap truth = scale_map(base, 1.5, 1.0);
  truth.values_z += bump.values_z;
  truth.values_x += bump.values_x;
  const SegmentStateSeries series = c_toe_cubic();
  const CompositeDataset d = observe(series, truth);
  // Stage 1 is taken at the known factors so stage 2 sees the bump alone.
  FitOptions opt;
  opt.restarts = 3;
  const CompositeDataset r = residual_dataset(d, base, {1.5, 1.0});
  const SemiParametricModel model = fit_residual(d, base, {1.5, 1.0}, default_initial(r), opt);
  const PosteriorGrid g = model.residual_grid(axes);
  const GridMask mask = sampled_region_mask(d, axes);
  double sq = 0.0;
  int n = 0;
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (!mask(i)) continue;
    sq += std::pow(g.mean.values_z(i) - bump.values_z(i), 2);
    ++n;
  }
  REQUIRE(n > 0);
  const double range = bump.values_z.maxCoeff() - bump.values_z.minCoeff();
  MESSAGE("bump nrmse " << std::sqrt(sq / n) / range << " over " << n << " nodes");
  CHECK(std::sqrt(sq / n) / range <= 0.10);
}

TEST_CASE("semi-parametric prediction beats the pure GP when the truth is a scaled base") {
  const GridStressMap base = base_profile();
  const GridStressMap truth = scale_map(base, 1.5, 1.0);
  const CompositeDataset d = observe(c_toe_cubic(), truth);
  FitOptions opt;
  opt.restarts = 1;
  const FitResult pure = fit_hyperparameters(d, default_initial(d), opt);
  const ScalingFit z = fit_scaling(d, base);
  opt.bounds = default_bounds(d);
  const SemiParametricModel semi = fit_residual(d, base, z, default_initial(d), opt);
  const GridAxes axes = uniform_axes();
  const double e_pure = rmse(pure.model->posterior_stress_grid(axes).mean.values_z, truth.values_z);
  const double e_semi = rmse(semi.posterior_stress_grid(axes).mean.values_z, truth.values_z);
  CHECK(e_semi < e_pure);
}
