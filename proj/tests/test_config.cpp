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


#include <filesystem>
#include <fstream>
#include <set>

#include <doctest.h>

#include "rftgp/config.hpp"
#include "rftgp/error.hpp"

using namespace rftgp;
using doctest::Approx;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("an empty object yields the defaults") {
  const ExperimentConfig c = parse_config("{}", "inline");
  CHECK(c.name == "experiment");
  CHECK(c.output_dir == "runs/experiment");
  CHECK(c.toe.kind == ToeKind::kCToe);
  CHECK(c.trajectory.kind == TrajectoryKind::kRectangle);
  CHECK(c.truth.source == TruthSource::kPrior);
  CHECK(c.grid_beta_nodes == 37);
  CHECK(c.inference.restarts == 3);
  CHECK(c.sweep.levels == std::vector<double>{0.0, 0.05, 0.2});
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("values are read from every section") {
  const ExperimentConfig c = parse_config(R"({
    "name": "probe",
    "toe": {"kind": "i_toe", "size_m": 0.03, "segments": 12},
    "trajectory": {"kind": "cubic_spline", "samples": 80,
                   "control_points_m": [[-0.1, 0.0], [0.0, -0.04], [0.1, 0.0]]},
    "surface_height_m": 0.01,
    "ground_truth": {"source": "prior", "seed": 9, "prior": {"signal_variance": 2.5,
                     "lengthscales": [1, 2, 3, 4]}},
    "observation": {"mode": "torque", "hip_m": [0.1, 0.3], "smoothing_window": 5},
    "noise": {"level": 0.05, "seed": 4},
    "inference": {"restarts": 2, "shared_kernels": true,
                  "bounds": {"lengthscale": [0.1, 5]}},
    "grid": {"beta_nodes": 19, "gamma_nodes": 21},
    "sweep": {"levels": [0, 0.1], "seeds": [3, 4]}
  })", "inline");
  CHECK(c.name == "probe");
  CHECK(c.output_dir == "runs/probe");
  CHECK(c.toe.kind == ToeKind::kIToe);
  CHECK(c.toe.segment_count == 12);
  CHECK(c.trajectory.spline.control_points.size() == 3);
  CHECK(c.trajectory.spline.control_points[1].y() == -0.04);
  CHECK(c.surface_height == 0.01);
  CHECK(c.truth.seed == 9);
  CHECK(c.truth.prior.lengthscales[3] == 4.0);
  CHECK(c.observation.mode == ObservationMode::kTorque);
  REQUIRE(c.observation.hip.has_value());
  CHECK(c.observation.hip->y() == 0.3);
  CHECK(c.noise.level == 0.05);
  CHECK(c.inference.shared_kernels);
  REQUIRE(c.inference.bounds.has_value());
  CHECK(c.inference.bounds->length_upper == 5.0);
  CHECK(c.grid_gamma_nodes == 21);
  CHECK(c.sweep.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("unknown keys and wrong types are config errors naming the path") {
  try {
    parse_config(R"({"toe": {"kind": "c_toe", "segmnets": 10}})", "typo.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    const std::string what = e.what();
    CHECK(what.find("typo.json") != std::string::npos);
    CHECK(what.find("segmnets") != std::string::npos);
  }
  CHECK(code_of([] { parse_config(R"({"colour": 1})", "x"); }) == ErrorCode::kConfig);
  CHECK(code_of([] { parse_config(R"({"noise": {"level": "high"}})", "x"); }) == ErrorCode::kConfig);
  CHECK(code_of([] { parse_config(R"({"toe": {"kind": "square"}})", "x"); }) == ErrorCode::kConfig);
  CHECK(code_of([] { parse_config("{not json", "x"); }) == ErrorCode::kConfig);
  CHECK(code_of([] { parse_config(R"({"toe": {"segments": 2.5}})", "x"); }) == ErrorCode::kConfig);
}

TEST_CASE("validation rejects out-of-range settings") {
  auto bad = [](const std::string& text) {
    return code_of([&] { validate(parse_config(text, "x")); });
  };
  CHECK(bad(R"({"toe": {"segments": 0}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"trajectory": {"samples": 1}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"noise": {"level": -0.1}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"inference": {"restarts": 0}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"grid": {"beta_nodes": 1}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"ground_truth": {"beta_nodes": 65}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"observation": {"smoothing_window": 4}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"sweep": {"levels": [0, -1]}})") == ErrorCode::kConfig);
  CHECK(bad(R"({"ground_truth": {"source": "file", "path": "/nonexistent/map.csv"}})") ==
        ErrorCode::kConfig);
  CHECK(bad(R"({"inference": {"base_map": "/nonexistent/base.csv"}})") == ErrorCode::kConfig);
}

TEST_CASE("dump and parse round-trip") {
  for (const ExperimentConfig& c : reference_configs()) {
    const std::string text = dump_config(c);
    const ExperimentConfig back = parse_config(text, c.name);
    CHECK(dump_config(back) == text);
    CHECK(config_digest(back) == config_digest(c));
  }
}

TEST_CASE("digest changes with content but not with the output directory") {
  ExperimentConfig a = reference_config("c_toe_gait2");
  const std::string base = config_digest(a);
  CHECK(base.size() == 16);
  a.output_dir = "/elsewhere";
  CHECK(config_digest(a) == base);
  ExperimentConfig b = reference_config("c_toe_gait2");
  b.noise.seed += 1;
  CHECK(config_digest(b) != base);
  ExperimentConfig c = reference_config("c_toe_gait2");
  c.truth.prior.lengthscales[1] = 1.0000001;
  CHECK(config_digest(c) != base);
}

TEST_CASE("reference configs cover both toes and both gaits") {
  const auto refs = reference_configs();
  REQUIRE(refs.size() == 4);
  std::set<std::string> names;
  for (const auto& c : refs) {
    names.insert(c.name);
    CHECK_NOTHROW(validate(c));
  }
  CHECK(names == std::set<std::string>{"i_toe_gait1", "i_toe_gait2", "c_toe_gait1", "c_toe_gait2"});
  const ExperimentConfig g2 = reference_config("i_toe_gait2");
  CHECK(g2.toe.kind == ToeKind::kIToe);
  CHECK(g2.trajectory.kind == TrajectoryKind::kCubicSpline);
  CHECK(reference_config("c_toe_gait1").trajectory.kind == TrajectoryKind::kRectangle);
  CHECK(code_of([] { reference_config("d_toe"); }) == ErrorCode::kConfig);
}

TEST_CASE("loading from disk validates and reports missing files") {
  const std::string good = write_temp("rftgp_cfg_good.json", R"({"name": "disk"})");
  CHECK(load_config(good).name == "disk");
  const std::string bad = write_temp("rftgp_cfg_bad.json", R"({"toe": {"segments": -3}})");
  CHECK(code_of([&] { load_config(bad); }) == ErrorCode::kConfig);
  const ErrorCode missing = code_of([] { load_config("/nonexistent/config.json"); });
  CHECK((missing == ErrorCode::kIo || missing == ErrorCode::kConfig));
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}
