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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <doctest.h>

#include "rftgp/error.hpp"
#include "rftgp/forward_model.hpp"

using namespace rftgp;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

GridStressMap random_map(std::uint64_t seed, int n = 13) {
  const GridAxes axes = uniform_axes(n, n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2e5, 2e5);
  GridStressMap m{axes.beta, axes.gamma, Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index i = 0; i < m.values_z.size(); ++i) {
    m.values_z(i) = u(rng);
    m.values_x(i) = u(rng);
  }
  m.values_z.row(n - 1) = m.values_z.row(0);
  m.values_x.row(n - 1) = m.values_x.row(0);
  return m;
}

SegmentStateSeries rectangle_series(ToeKind kind = ToeKind::kCToe, int segments = 10) {
  ToeSpec toe;
  toe.kind = kind;
  toe.segment_count = segments;
  return segment_states(make_toe(toe), make_trajectory(TrajectorySpec{}));
}

std::span<const SegmentState> step_states(const SegmentStateSeries& s, int step) {
  return {s.states.data() + static_cast<std::size_t>(step) * s.segments,
          static_cast<std::size_t>(s.segments)};
}

}  // namespace

TEST_CASE("emerged segments produce no force") {
  std::vector<SegmentState> states(5);
  for (auto& s : states) {
    s.submerged = false;
    s.area = 1e-3;
  }
  const ForceSample f = forward_force(states, random_map(1));
  CHECK(f.f_z == 0.0);
  CHECK(f.f_x == 0.0);
}

TEST_CASE("single segment force is depth times area times stress") {
  const GridAxes axes = uniform_axes(5, 5);
  const GridStressMap m{axes.beta, axes.gamma, Eigen::MatrixXd::Constant(5, 5, 1e6),
                        Eigen::MatrixXd::Zero(5, 5)};
  SegmentState s;
  s.depth = 0.01;
  s.area = 0.001;
  s.submerged = true;
  s.beta = 0.3;
  s.gamma = -0.2;
  const std::vector<SegmentState> states{s};
  CHECK(forward_force(states, m).f_z == Approx(10.0).epsilon(1e-15));
}

TEST_CASE("forward force matches per-segment summation on the rectangle gait") {
  const SegmentStateSeries series = rectangle_series();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GridStressMap m = random_map(seed);
    const int step = static_cast<int>(seed * 5 % series.steps);
    long double z = 0.0L;
    long double x = 0.0L;
    for (int k = 0; k < series.segments; ++k) {
      const SegmentState& s = series.at(step, k);
      if (!s.submerged || !s.moving) continue;
      const StressValue a = eval_map(m, s.beta, s.gamma);
      z += static_cast<long double>(s.depth) * s.area * a.z;
      x += static_cast<long double>(s.depth) * s.area * a.x;
    }
    const ForceSample f = forward_force(step_states(series, step), m);
    CHECK(f.f_z == Approx(static_cast<double>(z)).epsilon(1e-12));
    CHECK(f.f_x == Approx(static_cast<double>(x)).epsilon(1e-12));
  }
}

TEST_CASE("forward force is linear in the stress map") {
  const SegmentStateSeries series = rectangle_series();
  const GridStressMap a = random_map(30);
  const GridStressMap b = random_map(31);
  GridStressMap c = a;
  c.values_z = 0.3 * a.values_z + 2.0 * b.values_z;
  c.values_x = 0.3 * a.values_x + 2.0 * b.values_x;
  const auto fa = forward_forces(series, as_field(a));
  const auto fb = forward_forces(series, as_field(b));
  const auto fc = forward_forces(series, as_field(c));
  for (std::size_t i = 0; i < fc.size(); ++i) {
    const double scale = std::abs(0.3 * fa[i].f_z) + std::abs(2.0 * fb[i].f_z) + 1e-30;
    CHECK(std::abs(fc[i].f_z - (0.3 * fa[i].f_z + 2.0 * fb[i].f_z)) <= 1e-12 * scale);
    CHECK(fc[i].step == static_cast<int>(i));
  }
}

TEST_CASE("doubling every depth doubles the force") {
  const SegmentStateSeries series = rectangle_series();
  const GridStressMap m = random_map(40);
  for (int step = 0; step < series.steps; step += 7) {
    std::vector<SegmentState> states(step_states(series, step).begin(),
                                     step_states(series, step).end());
    const ForceSample f = forward_force(states, m);
    for (auto& s : states) s.depth *= 2.0;
    const ForceSample g = forward_force(states, m);
    CHECK(g.f_z == Approx(2.0 * f.f_z).epsilon(1e-14));
    CHECK(g.f_x == Approx(2.0 * f.f_x).epsilon(1e-14));
  }
}

TEST_CASE("C-Toe force converges under segment refinement for a smooth map") {
  const StressField smooth = [](double b, double g) {
    return StressValue{1e5 * (1.0 + 0.5 * std::cos(2 * b) * std::sin(g)),
                       3e4 * std::sin(2 * b) * std::cos(g), false};
  };
  const auto coarse = forward_forces(rectangle_series(ToeKind::kCToe, 50), smooth);
  const auto fine = forward_forces(rectangle_series(ToeKind::kCToe, 200), smooth);
  for (std::size_t i = 10; i < coarse.size(); i += 10) {
    CHECK(std::abs(fine[i].f_z - coarse[i].f_z) <= 0.01 * std::abs(fine[i].f_z));
  }
}

TEST_CASE("leading-edge option drops trailing segments only") {
  const SegmentStateSeries series = rectangle_series();
  const GridAxes axes = uniform_axes(5, 5);
  const GridStressMap ones{axes.beta, axes.gamma, Eigen::MatrixXd::Ones(5, 5),
                           Eigen::MatrixXd::Ones(5, 5)};
  ForwardOptions lead;
  lead.leading_edge_only = true;
  for (int step = 0; step < series.steps; ++step) {
    const ForceSample all = forward_force(step_states(series, step), ones);
    const ForceSample front = forward_force(step_states(series, step), ones, lead);
    CHECK(front.f_z <= all.f_z + 1e-18);
  }
}

TEST_CASE("noise: level zero is the identity and zero stays zero") {
  const ForceSample f{3.0, -2.0, 7};
  const ForceSample same = inject_noise(f, 0.0, 5);
  CHECK(same.f_z == 3.0);
  CHECK(same.f_x == -2.0);
  const ForceSample zero = inject_noise(ForceSample{0.0, 0.0, 3}, 0.2, 5);
  CHECK(zero.f_z == 0.0);
  CHECK(zero.f_x == 0.0);
  CHECK_THROWS_AS(inject_noise(f, -0.1, 5), Error);
}

TEST_CASE("noise factors have mean 1 and the requested variance") {
  const int draws = 10000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double v = inject_noise(ForceSample{1.0, 0.0, i}, 0.05, 11).f_z;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double var = (sum_sq - draws * mean * mean) / (draws - 1);
  CHECK(std::abs(mean - 1.0) <= 0.01);
  CHECK(std::abs(var - 0.05) <= 0.005);
}

TEST_CASE("noise is keyed by seed, step and channel") {
  CHECK(noise_factor(1, 4, 0, 0.2) == noise_factor(1, 4, 0, 0.2));
  CHECK(noise_factor(1, 4, 0, 0.2) != noise_factor(2, 4, 0, 0.2));
  CHECK(noise_factor(1, 4, 0, 0.2) != noise_factor(1, 5, 0, 0.2));
  CHECK(noise_factor(1, 4, 0, 0.2) != noise_factor(1, 4, 1, 0.2));
  const Eigen::VectorXd obs = Eigen::Vector2d(2.0, 3.0);
  const Eigen::VectorXd noisy = inject_noise(obs, 4, 0.2, 1);
  CHECK(noisy[0] == 2.0 * noise_factor(1, 4, 0, 0.2));
  CHECK(noisy[1] == 3.0 * noise_factor(1, 4, 1, 0.2));
}

TEST_CASE("dataset weights equal depth times area") {
  const SegmentStateSeries series = rectangle_series();
  const auto forces = forward_forces(series, as_field(random_map(50)));
  const CompositeDataset data = assemble_dataset(series, force_observations(forces), 1e-3);
  REQUIRE(data.size() == static_cast<std::size_t>(series.steps));
  CHECK(data.mode == ObservationMode::kForce);
  CHECK(data.channels == 2);
  for (int i = 0; i < series.steps; ++i) {
    REQUIRE(data.steps[i].weights.size() == static_cast<std::size_t>(series.segments));
    REQUIRE(data.steps[i].angles.size() == static_cast<std::size_t>(series.segments));
    for (int m = 0; m < series.segments; ++m) {
      const SegmentState& s = series.at(i, m);
      const double w = (s.submerged && s.moving) ? std::abs(s.depth) * s.area : 0.0;
      CHECK(data.steps[i].weights[m] == w);
      CHECK(data.steps[i].weights[m] >= 0.0);
    }
    CHECK(data.steps[i].observation[0] == forces[i].f_z);
    CHECK(data.steps[i].observation[1] == forces[i].f_x);
    CHECK(data.mixing(i, 0) == Eigen::Matrix2d::Identity());
  }
}

TEST_CASE("empty and emerged series") {
  SegmentStateSeries empty;
  CHECK(assemble_dataset(empty, {}, 0.0).empty());

  TrajectorySpec above;
  above.offset = {0.0, 0.5};
  const auto series = segment_states(make_toe(ToeSpec{}), make_trajectory(above));
  std::vector<Eigen::VectorXd> obs(series.steps, Eigen::Vector2d::Zero());
  const CompositeDataset data = assemble_dataset(series, obs, 0.0);
  for (const auto& s : data.steps) {
    for (double w : s.weights) CHECK(w == 0.0);
  }
  obs.pop_back();
  CHECK_THROWS_AS(assemble_dataset(series, obs, 0.0), Error);
}

TEST_CASE("torque mixing applies J^T to (F_x, -F_z)") {
  std::mt19937_64 rng(60);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Eigen::Matrix2d j;
    j << n(rng), n(rng), n(rng), n(rng);
    const double fz = n(rng);
    const double fx = n(rng);
    const Eigen::Vector2d tau = torque_mixing(j) * Eigen::Vector2d(fz, fx);
    const Eigen::Vector2d expect = force_to_torque(j, Eigen::Vector2d(fx, -fz));
    CHECK((tau - expect).norm() <= 1e-14 * (1.0 + expect.norm()));
  }
}

TEST_CASE("torque datasets carry per-segment mixing") {
  const SegmentStateSeries series = rectangle_series();
  LegMount mount;
  mount.hip = {0.2, 0.22};
  std::vector<JointAngles> joints;
  const auto jac = torque_jacobians(series, mount, &joints);
  REQUIRE(jac.size() == static_cast<std::size_t>(series.steps));
  REQUIRE(joints.size() == jac.size());
  for (int i = 0; i < series.steps; ++i) {
    const Eigen::Vector2d leg = fivebar_position(joints[i], mount.params);
    const Eigen::Vector2d toe(mount.hip.x() + leg.x(), mount.hip.y() - leg.y());
    CHECK((toe - series.reference_positions[i]).norm() <= 1e-10);
  }
  std::vector<Eigen::VectorXd> obs(series.steps, Eigen::Vector2d::Zero());
  const CompositeDataset data = assemble_dataset(series, obs, 0.0, jac);
  CHECK(data.mode == ObservationMode::kTorque);
  CHECK(data.mixing(3, 2) == jac[3][2]);
}

TEST_CASE("preprocessing: baseline subtraction and moving average") {
  const std::vector<double> raw{1.0, 2.0, 4.0, 8.0, 3.0};
  CHECK(preprocess_force_log({raw}, {raw}, 3) == std::vector<double>(5, 0.0));
  const std::vector<double> base{0.5, 0.5, 1.0, 1.0, 1.0};
  CHECK(preprocess_force_log({raw}, {base}, 1) == std::vector<double>{0.5, 1.5, 3.0, 7.0, 2.0});

  // tests/oracles/moving_average_oracle.py
  std::vector<double> step(10, 0.25);
  for (int k = 5; k < 10; ++k) step[k] += 1.0;
  const std::vector<double> out =
      preprocess_force_log({step}, {std::vector<double>(10, 0.25)}, 5);
  const double expect[] = {0, 0, 0, 0.2, 0.4, 0.6, 0.8, 1, 1, 1};
  for (int k = 0; k < 10; ++k) CHECK(out[k] == Approx(expect[k]).epsilon(1e-15).scale(1.0));
}

TEST_CASE("preprocessing averages trials and validates inputs") {
  const auto out = preprocess_force_log({{1.0, 2.0}, {3.0, 6.0}}, {{0.0, 0.0}}, 1);
  CHECK(out == std::vector<double>{2.0, 4.0});
  CHECK_THROWS_AS(preprocess_force_log({{1.0, 2.0}}, {{0.0}}, 1), Error);
  CHECK_THROWS_AS(preprocess_force_log({{1.0, 2.0}}, {{0.0, 0.0}}, 2), Error);
  CHECK_THROWS_AS(preprocess_force_log({{1.0}, {1.0, 2.0}}, {{0.0}}, 1), Error);
}

TEST_CASE("force and torque logs round-trip through CSV") {
  const ForceLog f{{0.0, 0.1}, {1.25, -3.5}, {0.1, 1e-17}};
  const auto dir = std::filesystem::temp_directory_path();
  const auto fp = dir / "rftgp_force_log.csv";
  std::ofstream(fp) << format_force_log(f);
  const ForceLog rf = read_force_log(fp.string());
  CHECK(rf.t == f.t);
  CHECK(rf.f_x == f.f_x);
  CHECK(rf.f_z == f.f_z);

  const TorqueLog t{{0.0}, {0.5}, {-0.25}, {0.1 * kPi}, {0.3}};
  const auto tp = dir / "rftgp_torque_log.csv";
  std::ofstream(tp) << format_torque_log(t);
  const TorqueLog rt = read_torque_log(tp.string());
  CHECK(rt.phi1 == t.phi1);
  CHECK(rt.tau2 == t.tau2);
  std::filesystem::remove(fp);
  std::filesystem::remove(tp);
  CHECK_THROWS_AS(read_force_log((dir / "rftgp_missing.csv").string()), Error);
}
