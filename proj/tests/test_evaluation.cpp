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


#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "rftgp/error.hpp"
#include "rftgp/evaluation.hpp"

using namespace rftgp;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

GridStressMap grid_of(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x) {
  const GridAxes axes = uniform_axes(static_cast<int>(z.rows()), static_cast<int>(z.cols()));
  return {axes.beta, axes.gamma, z, x};
}

GridStressMap random_grid(std::mt19937_64& rng, int n = 10) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd z(n, n);
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    z(i) = g(rng);
    x(i) = g(rng);
  }
  return grid_of(z, x);
}

CompositeDataset samples_at(const std::vector<Angles>& pts) {
  CompositeDataset d;
  for (const auto& p : pts) {
    CompositeStep s;
    s.angles = {p};
    s.weights = {1.0};
    s.observation = Eigen::Vector2d::Zero();
    d.steps.push_back(s);
  }
  return d;
}

CompositeDataset run_dataset(ToeKind toe, bool cubic) {
  ToeSpec ts;
  ts.kind = toe;
  TrajectorySpec tr;
  if (cubic) {
    tr.kind = TrajectoryKind::kCubicSpline;
    tr.spline.control_points = {{-0.2, 0.0}, {-0.1, -0.05}, {0.1, 0.0}, {0.2, -0.05}};
  }
  const auto series = segment_states(make_toe(ts), make_trajectory(tr));
  return assemble_dataset(series, std::vector<Eigen::VectorXd>(series.steps, Eigen::Vector2d::Zero()),
                          0.0);
}

}  // namespace

TEST_CASE("perfect reconstruction") {
  std::mt19937_64 rng(1);
  const GridStressMap t = random_grid(rng);
  const MetricsReport r = reconstruction_metrics(t, t);
  CHECK(r.z.rmse == 0.0);
  CHECK(r.z.mae == 0.0);
  CHECK(r.z.acr_pct == 100.0);
  CHECK(r.z.r2 == 1.0);
  CHECK(r.z.pearson == Approx(1.0).epsilon(1e-15));
  CHECK(r.x.nodes == 100);
}

TEST_CASE("negated estimate is perfectly anti-correlated") {
  std::mt19937_64 rng(2);
  const GridStressMap t = random_grid(rng);
  const GridStressMap e = grid_of(-t.values_z, -t.values_x);
  CHECK(reconstruction_metrics(e, t).z.pearson == Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("metrics match the frozen direct-formula oracle") {
  // tests/oracles/metrics_oracle.py
  Eigen::MatrixXd truth(3, 4);
  truth << 0.0, 1.0, 2.0, 3.0, 1.5, -0.5, 0.25, 2.5, 4.0, 3.5, -1.0, 0.75;
  Eigen::MatrixXd est(3, 4);
  est << 0.1, 0.9, 2.3, 2.9, 1.4, -0.2, 0.25, 2.7, 3.6, 3.55, -0.9, 0.7;
  const ComponentMetrics m = reconstruction_metrics(grid_of(est, est), grid_of(truth, truth)).z;
  CHECK(m.rmse == Approx(0.19039432764659769).epsilon(1e-12));
  CHECK(m.mae == Approx(0.14999999999999999).epsilon(1e-12));
  CHECK(m.r2 == Approx(0.98475912408759125).epsilon(1e-12));
  CHECK(m.pearson == Approx(0.99340306063791617).epsilon(1e-12));
  CHECK(m.acr_pct == Approx(75.0).epsilon(1e-12));
  CHECK(m.rmse_pct == Approx(3.8078865529319534).epsilon(1e-12));
}

TEST_CASE("metrics match direct formulas on random grids") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GridStressMap t = random_grid(rng);
    const GridStressMap e = random_grid(rng);
    const Eigen::ArrayXd a = Eigen::Map<const Eigen::ArrayXd>(e.values_x.data(), 100);
    const Eigen::ArrayXd b = Eigen::Map<const Eigen::ArrayXd>(t.values_x.data(), 100);
    const Eigen::ArrayXd err = a - b;
    const double range = b.maxCoeff() - b.minCoeff();
    const double rmse = std::sqrt(err.square().mean());
    const double mae = err.abs().mean();
    const double r2 = 1.0 - err.square().sum() / (b - b.mean()).square().sum();
    const double cov = ((a - a.mean()) * (b - b.mean())).sum();
    const double pearson =
        cov / std::sqrt((a - a.mean()).square().sum() * (b - b.mean()).square().sum());
    const double acr = 100.0 * (err.abs() <= 0.05 * range).cast<double>().mean();
    const ComponentMetrics m = reconstruction_metrics(e, t).x;
    CHECK(m.rmse == Approx(rmse).epsilon(1e-12));
    CHECK(m.mae == Approx(mae).epsilon(1e-12));
    CHECK(m.r2 == Approx(r2).epsilon(1e-12));
    CHECK(m.pearson == Approx(pearson).epsilon(1e-12));
    CHECK(m.acr_pct == Approx(acr).epsilon(1e-12));
    CHECK(m.mae_pct == Approx(100.0 * mae / range).epsilon(1e-12));
    CHECK(m.pearson >= -1.0);
    CHECK(m.pearson <= 1.0);
    CHECK(m.r2 <= 1.0);
  }
}

TEST_CASE("metrics ignore a shared node permutation") {
  std::mt19937_64 rng(4);
  const GridStressMap t = random_grid(rng);
  const GridStressMap e = random_grid(rng);
  std::vector<Eigen::Index> perm(100);
  for (Eigen::Index i = 0; i < 100; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd tp(10, 10);
  Eigen::MatrixXd ep(10, 10);
  for (Eigen::Index i = 0; i < 100; ++i) {
    tp(i) = t.values_z(perm[i]);
    ep(i) = e.values_z(perm[i]);
  }
  const ComponentMetrics a = reconstruction_metrics(e, t).z;
  const ComponentMetrics b = reconstruction_metrics(grid_of(ep, ep), grid_of(tp, tp)).z;
  CHECK(a.rmse == Approx(b.rmse).epsilon(1e-14));
  CHECK(a.mae == Approx(b.mae).epsilon(1e-14));
  CHECK(a.r2 == Approx(b.r2).epsilon(1e-14));
  CHECK(a.pearson == Approx(b.pearson).epsilon(1e-14));
  CHECK(a.acr_pct == b.acr_pct);
}

TEST_CASE("normalized errors are scale-invariant") {
  std::mt19937_64 rng(5);
  const GridStressMap t = random_grid(rng);
  const GridStressMap e = random_grid(rng);
  const ComponentMetrics a = reconstruction_metrics(e, t).z;
  const ComponentMetrics b =
      reconstruction_metrics(grid_of(7.5 * e.values_z, e.values_x), grid_of(7.5 * t.values_z, t.values_x)).z;
  CHECK(a.rmse_pct == Approx(b.rmse_pct).epsilon(1e-13));
  CHECK(a.mae_pct == Approx(b.mae_pct).epsilon(1e-13));
}

TEST_CASE("shrinking errors never lowers ACR") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GridStressMap t = random_grid(rng);
    const GridStressMap e = random_grid(rng);
    Eigen::MatrixXd closer = e.values_z;
    for (Eigen::Index i = 0; i < closer.size(); ++i) {
      closer(i) = t.values_z(i) + u(rng) * (e.values_z(i) - t.values_z(i));
    }
    CHECK(reconstruction_metrics(grid_of(closer, closer), t).z.acr_pct >=
          reconstruction_metrics(e, t).z.acr_pct);
  }
}

TEST_CASE("masks, mismatched axes and flat truth") {
  std::mt19937_64 rng(7);
  const GridStressMap t = random_grid(rng);
  GridMask mask = GridMask::Constant(10, 10, false);
  mask(2, 3) = true;
  mask(5, 5) = true;
  const ComponentMetrics m = reconstruction_metrics(t, t, mask).z;
  CHECK(m.nodes == 2);
  CHECK(m.rmse == 0.0);
  CHECK_THROWS_AS(reconstruction_metrics(t, t, GridMask::Constant(3, 3, true)), Error);
  CHECK_THROWS_AS(reconstruction_metrics(random_grid(rng, 9), t), Error);

  const GridStressMap flat = grid_of(Eigen::MatrixXd::Constant(4, 4, 2.0), Eigen::MatrixXd::Ones(4, 4));
  const ComponentMetrics f = reconstruction_metrics(flat, flat).z;
  CHECK_FALSE(f.normalized_defined);
  CHECK(std::isnan(f.acr_pct));
  CHECK(f.rmse == 0.0);
}

TEST_CASE("sampled-region mask marks nodes near weighted samples") {
  const GridAxes axes = uniform_axes();
  const CompositeDataset d = samples_at({{0.0, 0.0}, {kPi / 2 - 1e-6, 1.0}});
  const GridMask mask = sampled_region_mask(d, axes);
  CHECK(mask(18, 18));
  CHECK_FALSE(mask(18, 25));
  // beta wraps: a sample just below pi/2 also covers the -pi/2 row.
  const auto g = static_cast<Eigen::Index>(std::lround((1.0 + kPi / 2) / (kPi / 36)));
  CHECK(mask(36, g));
  CHECK(mask(0, g));
  CompositeDataset none = d;
  for (auto& s : none.steps) s.weights[0] = 0.0;
  CHECK_FALSE(sampled_region_mask(none, axes).any());
}

TEST_CASE("identical samples are maximally redundant") {
  const CompositeDataset d = samples_at(std::vector<Angles>(8, Angles(0.3, 0.4)));
  const SamplingDiagnostics s = sampling_diagnostics(d);
  CHECK(s.total_samples == 8);
  CHECK(s.unique_samples == 1);
  CHECK(s.redundancy == Approx(1.0 - 1.0 / 8.0));
  CHECK(s.coverage_bins == 1);
  CHECK(s.coverage_area == Approx(std::pow(kPi / 36, 2)));
}

TEST_CASE("distinct samples in distinct bins") {
  std::vector<Angles> pts;
  for (int k = 0; k < 6; ++k) pts.emplace_back(-1.4 + 0.5 * k, -1.2 + 0.45 * k);
  const SamplingDiagnostics s = sampling_diagnostics(samples_at(pts));
  CHECK(s.redundancy == 0.0);
  CHECK(s.coverage_bins == 6);
  CHECK(s.sign_region_hits == 1);
}

TEST_CASE("a duplicate sample raises redundancy and keeps coverage") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
  std::vector<Angles> pts;
  for (int k = 0; k < 30; ++k) pts.emplace_back(u(rng), u(rng));
  const SamplingDiagnostics a = sampling_diagnostics(samples_at(pts));
  pts.push_back(pts[7]);
  const SamplingDiagnostics b = sampling_diagnostics(samples_at(pts));
  CHECK(b.redundancy > a.redundancy);
  CHECK(b.coverage_bins == a.coverage_bins);
  CHECK(b.coverage_bins <= 36 * 36);
  CHECK_THROWS_AS(sampling_diagnostics(samples_at(pts), 0.0), Error);
}

TEST_CASE("I-Toe rectangle gait is more redundant than C-Toe cubic gait") {
  const SamplingDiagnostics i_rect = sampling_diagnostics(run_dataset(ToeKind::kIToe, false));
  const SamplingDiagnostics c_cubic = sampling_diagnostics(run_dataset(ToeKind::kCToe, true));
  CHECK(i_rect.redundancy > c_cubic.redundancy);
  CHECK(c_cubic.coverage_bins > i_rect.coverage_bins);
}

TEST_CASE("metric records are key = value lines") {
  std::mt19937_64 rng(9);
  const GridStressMap t = random_grid(rng);
  const std::string text = format_metrics(reconstruction_metrics(t, t), "masked.");
  CHECK(text.find("masked.z.rmse = 0\n") != std::string::npos);
  CHECK(text.find("masked.x.acr_pct = 100\n") != std::string::npos);
  const std::string diag = format_diagnostics(sampling_diagnostics(run_dataset(ToeKind::kCToe, true)));
  CHECK(diag.find("redundancy = ") == 0);
  CHECK(diag.find("coverage_bins = ") != std::string::npos);
}
