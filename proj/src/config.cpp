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


#include "rftgp/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"

namespace rftgp {
namespace {

using Json = nlohmann::json;

class Reader {
 public:
  Reader(const Json& node, std::string path, const std::string& origin)
      : node_(node), path_(std::move(path)), origin_(origin) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& item : node_.items()) {
      if (!known.count(item.key())) {
        fail(join(item.key()), "unknown key");
      }
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  Reader child(const char* key) const { return Reader(node_.at(key), join(key), origin_); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_number()) fail(join(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(join(key), "expected a finite number");
    return d;
  }

  int integer(const char* key, int fallback) const {
    if (!has(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_number_integer()) fail(join(key), "expected an integer");
    return v.get<int>();
  }

  std::uint64_t seed(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      fail(join(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_boolean()) fail(join(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = node_.at(key);
    if (!v.is_string()) fail(join(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key) const {
    const Json& v = node_.at(key);
    if (!v.is_array()) fail(join(key), "expected an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) fail(join(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Eigen::Vector2d point(const char* key) const {
    const auto v = numbers(key);
    if (v.size() != 2) fail(join(key), "expected [x, z]");
    return {v[0], v[1]};
  }

  std::vector<std::string> strings(const char* key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    const Json& v = node_.at(key);
    if (!v.is_array()) fail(join(key), "expected an array of strings");
    for (const Json& e : v) {
      if (!e.is_string()) fail(join(key), "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw Error(ErrorCode::kConfig, origin_ + ": " + where + ": " + what);
  }

  const std::string& path() const { return path_; }

 private:
  std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const Json& node_;
  std::string path_;
  const std::string& origin_;
};

template <typename Enum>
Enum pick(const Reader& r, const char* key, Enum fallback,
          std::initializer_list<std::pair<const char*, Enum>> choices) {
  if (!r.has(key)) return fallback;
  const std::string name = r.string(key, "");
  for (const auto& [label, value] : choices) {
    if (name == label) return value;
  }
  std::string options;
  for (const auto& [label, value] : choices) {
    options += options.empty() ? label : std::string(", ") + label;
  }
  r.fail(r.path().empty() ? key : r.path() + "." + key,
         "'" + name + "' is not one of " + options);
}

KernelConfig read_kernel(const Reader& r, KernelConfig k) {
  r.allow({"signal_variance", "lengthscales"});
  k.signal_variance = r.number("signal_variance", k.signal_variance);
  if (r.has("lengthscales")) {
    const auto l = r.numbers("lengthscales");
    if (l.size() != 4) r.fail(r.path() + ".lengthscales", "expected 4 lengthscales");
    for (int d = 0; d < 4; ++d) k.lengthscales[d] = l[d];
  }
  return k;
}

Json kernel_json(const KernelConfig& k) {
  return Json{{"signal_variance", k.signal_variance},
              {"lengthscales", std::vector<double>(k.lengthscales.begin(),
                                                   k.lengthscales.end())}};
}

Json point_json(const Eigen::Vector2d& p) { return Json::array({p.x(), p.y()}); }

const char* toe_name(ToeKind k) { return k == ToeKind::kIToe ? "i_toe" : "c_toe"; }

const char* trajectory_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kRectangle: return "rectangle";
    case TrajectoryKind::kCubicSpline: return "cubic_spline";
    case TrajectoryKind::kRotation: return "rotation";
  }
  return "rectangle";
}

const char* truth_name(TruthSource s) {
  switch (s) {
    case TruthSource::kPrior: return "prior";
    case TruthSource::kFile: return "file";
    case TruthSource::kScaledBase: return "scaled_base";
  }
  return "prior";
}

const char* mode_name(ObservationMode m) {
  return m == ObservationMode::kForce ? "force" : "torque";
}

Json to_json(const ExperimentConfig& c) {
  Json cp = Json::array();
  for (const auto& p : c.trajectory.spline.control_points) cp.push_back(point_json(p));
  Json j;
  j["name"] = c.name;
  j["toe"] = {{"kind", toe_name(c.toe.kind)},
              {"size_m", c.toe.size},
              {"width_m", c.toe.width},
              {"segments", c.toe.segment_count},
              {"attitude_rad", c.toe.attitude}};
  j["trajectory"] = {
      {"kind", trajectory_name(c.trajectory.kind)},
      {"samples", c.trajectory.sample_count},
      {"speed_m_s", c.trajectory.speed},
      {"offset_m", point_json(c.trajectory.offset)},
      {"rectangle",
       {{"penetration_m", c.trajectory.rectangle.penetration},
        {"shear_m", c.trajectory.rectangle.shear},
        {"extraction_m", c.trajectory.rectangle.extraction}}},
      {"control_points_m", cp},
      {"rotation",
       {{"center_m", point_json(c.trajectory.rotation.center)},
        {"range_rad", c.trajectory.rotation.angular_range},
        {"direction", c.trajectory.rotation.direction}}}};
  j["surface_height_m"] = c.surface_height;
  j["ground_truth"] = {{"source", truth_name(c.truth.source)},
                       {"seed", c.truth.seed},
                       {"prior", kernel_json(c.truth.prior)},
                       {"beta_nodes", c.truth.beta_nodes},
                       {"gamma_nodes", c.truth.gamma_nodes},
                       {"path", c.truth.path},
                       {"zeta_z", c.truth.zeta_z},
                       {"zeta_x", c.truth.zeta_x}};
  Json obs = {{"mode", mode_name(c.observation.mode)},
              {"leading_edge_only", c.observation.leading_edge_only},
              {"leg",
               {{"l1_m", c.observation.leg.l1},
                {"l2_m", c.observation.leg.l2},
                {"l3_m", c.observation.leg.l3},
                {"torque_constant", c.observation.leg.torque_constant}}},
              {"trials", c.observation.trials},
              {"baseline_trials", c.observation.baseline_trials},
              {"smoothing_window", c.observation.smoothing_window}};
  if (c.observation.hip) obs["hip_m"] = point_json(*c.observation.hip);
  j["observation"] = obs;
  j["noise"] = {{"level", c.noise.level}, {"seed", c.noise.seed}};
  Json inf = {{"restarts", c.inference.restarts},
              {"seed", c.inference.seed},
              {"shared_kernels", c.inference.shared_kernels},
              {"max_iterations", c.inference.max_iterations},
              {"base_map", c.inference.base_map}};
  if (c.inference.initial) {
    inf["initial"] = {{"kernel_z", kernel_json(c.inference.initial->kernel_z)},
                      {"kernel_x", kernel_json(c.inference.initial->kernel_x)},
                      {"noise_variance", c.inference.initial->noise_variance}};
  }
  if (c.inference.bounds) {
    const HyperBounds& b = *c.inference.bounds;
    inf["bounds"] = {{"signal_variance", {b.signal_lower, b.signal_upper}},
                     {"lengthscale", {b.length_lower, b.length_upper}},
                     {"noise_variance", {b.noise_lower, b.noise_upper}}};
  }
  j["inference"] = inf;
  j["grid"] = {{"beta_nodes", c.grid_beta_nodes}, {"gamma_nodes", c.grid_gamma_nodes}};
  j["metrics"] = {{"mask_radius_rad", c.metrics.mask_radius},
                  {"angle_quantum_rad", c.metrics.angle_quantum},
                  {"coverage_bin_rad", c.metrics.coverage_bin}};
  j["sweep"] = {{"levels", c.sweep.levels}, {"seeds", c.sweep.seeds}};
  j["output_dir"] = c.output_dir;
  return j;
}

std::pair<double, double> read_range(const Reader& r, const char* key,
                                     std::pair<double, double> fallback) {
  if (!r.has(key)) return fallback;
  const auto v = r.numbers(key);
  if (v.size() != 2) r.fail(r.path() + "." + key, "expected [lower, upper]");
  return {v[0], v[1]};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kConfig, message);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kConfig, origin + ": " + e.what());
  }
  ExperimentConfig c;
  const Reader r(root, "", origin);
  r.allow({"name", "toe", "trajectory", "surface_height_m", "ground_truth",
           "observation", "noise", "inference", "grid", "metrics", "sweep",
           "output_dir"});
  c.name = r.string("name", c.name);
  c.output_dir = r.string("output_dir", "runs/" + c.name);
  c.surface_height = r.number("surface_height_m", c.surface_height);

  if (r.has("toe")) {
    const Reader t = r.child("toe");
    t.allow({"kind", "size_m", "width_m", "segments", "attitude_rad"});
    c.toe.kind = pick(t, "kind", c.toe.kind,
                      {{"i_toe", ToeKind::kIToe}, {"c_toe", ToeKind::kCToe}});
    c.toe.size = t.number("size_m", c.toe.size);
    c.toe.width = t.number("width_m", c.toe.width);
    c.toe.segment_count = t.integer("segments", c.toe.segment_count);
    c.toe.attitude = t.number("attitude_rad", c.toe.attitude);
  }

  if (r.has("trajectory")) {
    const Reader t = r.child("trajectory");
    t.allow({"kind", "samples", "speed_m_s", "offset_m", "rectangle",
             "control_points_m", "rotation"});
    auto& tr = c.trajectory;
    tr.kind = pick(t, "kind", tr.kind,
                   {{"rectangle", TrajectoryKind::kRectangle},
                    {"cubic_spline", TrajectoryKind::kCubicSpline},
                    {"rotation", TrajectoryKind::kRotation}});
    tr.sample_count = t.integer("samples", tr.sample_count);
    tr.speed = t.number("speed_m_s", tr.speed);
    if (t.has("offset_m")) tr.offset = t.point("offset_m");
    if (t.has("rectangle")) {
      const Reader g = t.child("rectangle");
      g.allow({"penetration_m", "shear_m", "extraction_m"});
      tr.rectangle.penetration = g.number("penetration_m", tr.rectangle.penetration);
      tr.rectangle.shear = g.number("shear_m", tr.rectangle.shear);
      tr.rectangle.extraction = g.number("extraction_m", tr.rectangle.extraction);
    }
    if (t.has("control_points_m")) {
      const Json& pts = root.at("trajectory").at("control_points_m");
      if (!pts.is_array()) t.fail("trajectory.control_points_m", "expected [[x, z], ...]");
      tr.spline.control_points.clear();
      for (const Json& p : pts) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          t.fail("trajectory.control_points_m", "expected [[x, z], ...]");
        }
        tr.spline.control_points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    if (t.has("rotation")) {
      const Reader g = t.child("rotation");
      g.allow({"center_m", "range_rad", "direction"});
      if (g.has("center_m")) tr.rotation.center = g.point("center_m");
      tr.rotation.angular_range = g.number("range_rad", tr.rotation.angular_range);
      tr.rotation.direction = g.integer("direction", tr.rotation.direction);
    }
  }

  if (r.has("ground_truth")) {
    const Reader g = r.child("ground_truth");
    g.allow({"source", "seed", "prior", "beta_nodes", "gamma_nodes", "path",
             "zeta_z", "zeta_x"});
    c.truth.source = pick(g, "source", c.truth.source,
                          {{"prior", TruthSource::kPrior},
                           {"file", TruthSource::kFile},
                           {"scaled_base", TruthSource::kScaledBase}});
    c.truth.seed = g.seed("seed", c.truth.seed);
    if (g.has("prior")) c.truth.prior = read_kernel(g.child("prior"), c.truth.prior);
    c.truth.beta_nodes = g.integer("beta_nodes", c.truth.beta_nodes);
    c.truth.gamma_nodes = g.integer("gamma_nodes", c.truth.gamma_nodes);
    c.truth.path = g.string("path", c.truth.path);
    c.truth.zeta_z = g.number("zeta_z", c.truth.zeta_z);
    c.truth.zeta_x = g.number("zeta_x", c.truth.zeta_x);
  }

  if (r.has("observation")) {
    const Reader o = r.child("observation");
    o.allow({"mode", "leading_edge_only", "hip_m", "leg", "trials",
             "baseline_trials", "smoothing_window"});
    auto& obs = c.observation;
    obs.mode = pick(o, "mode", obs.mode,
                    {{"force", ObservationMode::kForce},
                     {"torque", ObservationMode::kTorque}});
    obs.leading_edge_only = o.boolean("leading_edge_only", obs.leading_edge_only);
    if (o.has("hip_m")) obs.hip = o.point("hip_m");
    if (o.has("leg")) {
      const Reader l = o.child("leg");
      l.allow({"l1_m", "l2_m", "l3_m", "torque_constant"});
      obs.leg.l1 = l.number("l1_m", obs.leg.l1);
      obs.leg.l2 = l.number("l2_m", obs.leg.l2);
      obs.leg.l3 = l.number("l3_m", obs.leg.l3);
      obs.leg.torque_constant = l.number("torque_constant", obs.leg.torque_constant);
    }
    obs.trials = o.strings("trials");
    obs.baseline_trials = o.strings("baseline_trials");
    obs.smoothing_window = o.integer("smoothing_window", obs.smoothing_window);
  }

  if (r.has("noise")) {
    const Reader n = r.child("noise");
    n.allow({"level", "seed"});
    c.noise.level = n.number("level", c.noise.level);
    c.noise.seed = n.seed("seed", c.noise.seed);
  }

  if (r.has("inference")) {
    const Reader n = r.child("inference");
    n.allow({"restarts", "seed", "shared_kernels", "max_iterations", "initial",
             "bounds", "base_map"});
    auto& inf = c.inference;
    inf.restarts = n.integer("restarts", inf.restarts);
    inf.seed = n.seed("seed", inf.seed);
    inf.shared_kernels = n.boolean("shared_kernels", inf.shared_kernels);
    inf.max_iterations = n.integer("max_iterations", inf.max_iterations);
    inf.base_map = n.string("base_map", inf.base_map);
    if (n.has("initial")) {
      const Reader i = n.child("initial");
      i.allow({"kernel_z", "kernel_x", "noise_variance"});
      Hyperparameters h;
      if (i.has("kernel_z")) h.kernel_z = read_kernel(i.child("kernel_z"), h.kernel_z);
      if (i.has("kernel_x")) h.kernel_x = read_kernel(i.child("kernel_x"), h.kernel_x);
      h.noise_variance = i.number("noise_variance", h.noise_variance);
      inf.initial = h;
    }
    if (n.has("bounds")) {
      const Reader b = n.child("bounds");
      b.allow({"signal_variance", "lengthscale", "noise_variance"});
      HyperBounds hb;
      std::tie(hb.signal_lower, hb.signal_upper) =
          read_range(b, "signal_variance", {hb.signal_lower, hb.signal_upper});
      std::tie(hb.length_lower, hb.length_upper) =
          read_range(b, "lengthscale", {hb.length_lower, hb.length_upper});
      std::tie(hb.noise_lower, hb.noise_upper) =
          read_range(b, "noise_variance", {hb.noise_lower, hb.noise_upper});
      inf.bounds = hb;
    }
  }

  if (r.has("grid")) {
    const Reader g = r.child("grid");
    g.allow({"beta_nodes", "gamma_nodes"});
    c.grid_beta_nodes = g.integer("beta_nodes", c.grid_beta_nodes);
    c.grid_gamma_nodes = g.integer("gamma_nodes", c.grid_gamma_nodes);
  }

  if (r.has("metrics")) {
    const Reader m = r.child("metrics");
    m.allow({"mask_radius_rad", "angle_quantum_rad", "coverage_bin_rad"});
    c.metrics.mask_radius = m.number("mask_radius_rad", c.metrics.mask_radius);
    c.metrics.angle_quantum = m.number("angle_quantum_rad", c.metrics.angle_quantum);
    c.metrics.coverage_bin = m.number("coverage_bin_rad", c.metrics.coverage_bin);
  }

  if (r.has("sweep")) {
    const Reader s = r.child("sweep");
    s.allow({"levels", "seeds"});
    if (s.has("levels")) c.sweep.levels = s.numbers("levels");
    if (s.has("seeds")) {
      const Json& v = root.at("sweep").at("seeds");
      if (!v.is_array()) s.fail("sweep.seeds", "expected an array of seeds");
      c.sweep.seeds.clear();
      for (const Json& e : v) {
        if (!e.is_number_unsigned()) s.fail("sweep.seeds", "expected non-negative integers");
        c.sweep.seeds.push_back(e.get<std::uint64_t>());
      }
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  ExperimentConfig c = parse_config(text, path);
  validate(c);
  return c;
}

std::string dump_config(const ExperimentConfig& config) {
  return to_json(config).dump(2) + "\n";
}

void validate(const ExperimentConfig& c) {
  try {
    make_toe(c.toe);
    make_trajectory(c.trajectory);
    validate(c.truth.prior);
    validate(c.observation.leg);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("invalid config: ") + e.what());
  }
  require(std::isfinite(c.surface_height), "surface_height_m must be finite");
  require(c.truth.beta_nodes >= 2 && c.truth.gamma_nodes >= 2,
          "ground_truth grid needs at least 2x2 nodes");
  require(c.truth.beta_nodes <= 64 && c.truth.gamma_nodes <= 64,
          "ground_truth grid is limited to 64x64 nodes");
  require(c.grid_beta_nodes >= 2 && c.grid_gamma_nodes >= 2,
          "grid needs at least 2x2 nodes");
  require(c.grid_beta_nodes <= 1000 && c.grid_gamma_nodes <= 1000,
          "grid is limited to 1000x1000 nodes");
  require(c.noise.level >= 0.0, "noise.level must be >= 0");
  require(c.inference.restarts >= 1, "inference.restarts must be >= 1");
  require(c.inference.max_iterations >= 1, "inference.max_iterations must be >= 1");
  require(c.metrics.mask_radius > 0.0, "metrics.mask_radius_rad must be > 0");
  require(c.metrics.angle_quantum > 0.0 && c.metrics.coverage_bin > 0.0,
          "metrics quanta must be > 0");
  require(c.observation.smoothing_window >= 1 && c.observation.smoothing_window % 2 == 1,
          "observation.smoothing_window must be odd and >= 1");
  for (double level : c.sweep.levels) {
    require(level >= 0.0, "sweep.levels must be >= 0");
  }
  if (c.inference.initial) {
    try {
      validate(*c.inference.initial);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, std::string("inference.initial: ") + e.what());
    }
  }
  if (c.inference.bounds) {
    const HyperBounds& b = *c.inference.bounds;
    require(b.signal_lower > 0.0 && b.signal_upper >= b.signal_lower &&
                b.length_lower > 0.0 && b.length_upper >= b.length_lower &&
                b.noise_lower > 0.0 && b.noise_upper >= b.noise_lower,
            "inference.bounds must be positive [lower, upper] pairs");
  }
  auto must_exist = [](const std::string& path, const std::string& what) {
    require(std::filesystem::exists(path), what + " not found: " + path);
  };
  if (c.truth.source != TruthSource::kPrior) {
    require(!c.truth.path.empty(), "ground_truth.path is required for this source");
    must_exist(c.truth.path, "ground_truth.path");
  }
  if (!c.inference.base_map.empty()) must_exist(c.inference.base_map, "inference.base_map");
  for (const auto& p : c.observation.trials) must_exist(p, "observation trial");
  for (const auto& p : c.observation.baseline_trials) must_exist(p, "observation baseline");
}

std::string config_digest(const ExperimentConfig& config) {
  Json j = to_json(config);
  j.erase("output_dir");
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ExperimentConfig> reference_configs() {
  std::vector<ExperimentConfig> out;
  for (const char* name : {"i_toe_gait1", "i_toe_gait2", "c_toe_gait1", "c_toe_gait2"}) {
    out.push_back(reference_config(name));
  }
  return out;
}

ExperimentConfig reference_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.output_dir = "runs/" + name;
  if (name.rfind("i_toe", 0) == 0) {
    c.toe.kind = ToeKind::kIToe;
  } else if (name.rfind("c_toe", 0) == 0) {
    c.toe.kind = ToeKind::kCToe;
  } else {
    throw Error(ErrorCode::kConfig, "unknown reference config: " + name);
  }
  if (name.ends_with("gait1")) {
    c.trajectory.kind = TrajectoryKind::kRectangle;
  } else if (name.ends_with("gait2")) {
    c.trajectory.kind = TrajectoryKind::kCubicSpline;
    c.trajectory.spline.control_points = {{-0.2, 0.0}, {-0.1, -0.05}, {0.1, 0.0}, {0.2, -0.05}};
  } else {
    throw Error(ErrorCode::kConfig, "unknown reference config: " + name);
  }
  return c;
}

}  // namespace rftgp
