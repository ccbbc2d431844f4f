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


#include "rftgp/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"
#include "rftgp/fivebar.hpp"
#include "rftgp/heatmap.hpp"

namespace rftgp {
namespace {

namespace fs = std::filesystem;

constexpr double kHipHeight = 0.22;
constexpr const char* kMeanSection = "[posterior_mean]";
constexpr const char* kVarianceSection = "[posterior_variance]";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void line(std::string& out, const std::string& key, const std::string& value) {
  out += key + " = " + value + "\n";
}

void line(std::string& out, const std::string& key, double value) {
  line(out, key, format_double(value));
}

const char* mode_label(ObservationMode m) {
  return m == ObservationMode::kForce ? "force" : "torque";
}

// Stage-tagged log and failure bookkeeping for one output directory.
class RunContext {
 public:
  explicit RunContext(const ExperimentConfig& config)
      : dir_(config.output_dir), start_(std::chrono::steady_clock::now()) {
    try {
      fs::create_directories(dir_);
      fs::remove(fs::path(dir_) / "FAILED");
    } catch (const fs::filesystem_error& e) {
      throw Error(ErrorCode::kIo, "cannot prepare output directory " + dir_ + ": " + e.what());
    }
    artifacts.directory = dir_;
    artifacts.config_digest = config_digest(config);
  }

  void stage(const std::string& name) {
    stage_ = name;
    log("stage " + name);
  }

  void log(const std::string& message) {
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "[%8.3f s] ", t);
    log_ += buf + message + "\n";
  }

  void warn(const std::string& message) {
    artifacts.warnings.push_back(message);
    log("warning: " + message);
  }

  void write(const std::string& name, const std::string& contents) {
    write_text_file((fs::path(dir_) / name).string(), contents);
    artifacts.files.push_back(name);
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  void finish() {
    log("done");
    write_text_file(path("run.log"), log_);
  }

  [[noreturn]] void fail(const Error& e) {
    log("error in " + stage_ + ": " + e.what());
    std::string marker;
    line(marker, "stage", stage_);
    line(marker, "exit_code", std::to_string(exit_code_for(e.code())));
    line(marker, "message", e.what());
    try {
      write_text_file(path("FAILED"), marker);
      write_text_file(path("run.log"), log_);
    } catch (const Error&) {
    }
    throw Error(e.code(), stage_ + ": " + e.what());
  }

  RunArtifacts artifacts;

 private:
  std::string dir_;
  std::string stage_ = "setup";
  std::string log_;
  std::chrono::steady_clock::time_point start_;
};

template <typename Body>
RunArtifacts guarded(const ExperimentConfig& config, Body&& body) {
  RunContext ctx(config);
  try {
    body(ctx);
  } catch (const Error& e) {
    ctx.fail(e);
  } catch (const std::exception& e) {
    ctx.fail(Error(ErrorCode::kNumerical, e.what()));
  }
  ctx.finish();
  return ctx.artifacts;
}

LegMount leg_mount(const ExperimentConfig& config, const SegmentStateSeries& series) {
  LegMount mount;
  mount.params = config.observation.leg;
  if (config.observation.hip) {
    mount.hip = *config.observation.hip;
  } else {
    double lo = series.reference_positions.front().x();
    double hi = lo;
    for (const auto& p : series.reference_positions) {
      lo = std::min(lo, p.x());
      hi = std::max(hi, p.x());
    }
    mount.hip = Eigen::Vector2d(0.5 * (lo + hi), config.surface_height + kHipHeight);
  }
  return mount;
}

// Series as seen by the inverse model: with the leading-edge option, trailing
// segments are treated as out of contact.
SegmentStateSeries contact_series(const ExperimentConfig& config, SegmentStateSeries series) {
  if (config.observation.leading_edge_only) {
    for (auto& s : series.states) {
      if (!s.leading) s.submerged = false;
    }
  }
  return series;
}

std::string observations_csv(const ExperimentConfig& config, const Simulation& sim) {
  if (config.observation.mode == ObservationMode::kForce) {
    ForceLog log;
    for (std::size_t i = 0; i < sim.observations.size(); ++i) {
      log.t.push_back(sim.series.timestamps[i]);
      log.f_z.push_back(sim.observations[i][0]);
      log.f_x.push_back(sim.observations[i][1]);
    }
    return format_force_log(log);
  }
  TorqueLog log;
  for (std::size_t i = 0; i < sim.observations.size(); ++i) {
    log.t.push_back(sim.series.timestamps[i]);
    log.tau1.push_back(sim.observations[i][0]);
    log.tau2.push_back(sim.observations[i][1]);
    log.phi1.push_back(sim.joints[i].phi1);
    log.phi2.push_back(sim.joints[i].phi2);
  }
  return format_torque_log(log);
}

GridStressMap variance_map(const PosteriorGrid& grid) {
  GridStressMap v = grid.mean;
  v.values_z = grid.variance_z;
  v.values_x = grid.variance_x;
  return v;
}

struct Reconstruction {
  PosteriorGrid grid;
  ModelRecord record;
};

Reconstruction reconstruct(RunContext& ctx, const ExperimentConfig& config,
                           const CompositeDataset& data) {
  const GridAxes axes = uniform_axes(config.grid_beta_nodes, config.grid_gamma_nodes);
  FitOptions options;
  options.bounds = config.inference.bounds;
  options.restarts = config.inference.restarts;
  options.seed = config.inference.seed;
  options.shared_hyperparameters = config.inference.shared_kernels;
  options.max_iterations = config.inference.max_iterations;

  Reconstruction out;
  out.record.config_digest = ctx.artifacts.config_digest;
  out.record.dataset_digest = hex64(dataset_digest(data));
  out.record.mode = data.mode;

  const bool has_weight = std::any_of(data.steps.begin(), data.steps.end(), [](const auto& s) {
    return std::any_of(s.weights.begin(), s.weights.end(), [](double w) { return w != 0.0; });
  });
  if (!has_weight) {
    ctx.warn("no segment is in contact; the reconstruction is the prior");
    const Hyperparameters h = config.inference.initial.value_or(Hyperparameters{});
    const GpModel prior(CompositeDataset{}, h);
    out.grid = prior.posterior_stress_grid(axes);
    out.record.hyperparameters = h;
    return out;
  }

  if (!config.inference.base_map.empty()) {
    ctx.stage("scaling");
    const GridStressMap base = read_stress_map(config.inference.base_map);
    const ScalingFit zeta = fit_scaling(data, base);
    ctx.log("zeta_z = " + format_double(zeta.zeta_z) + ", zeta_x = " + format_double(zeta.zeta_x));
    ctx.stage("fit");
    const CompositeDataset residual = residual_dataset(data, base, zeta);
    const Hyperparameters init = config.inference.initial.value_or(default_initial(residual));
    const SemiParametricModel model = fit_residual(data, base, zeta, init, options);
    ctx.stage("posterior");
    out.grid = model.posterior_stress_grid(axes);
    out.record.hyperparameters = model.residual_fit().hyperparameters;
    out.record.log_likelihood = model.residual_fit().log_likelihood;
    out.record.jitter = model.residual().jitter();
    out.record.scaling = zeta;
    return out;
  }

  ctx.stage("fit");
  const Hyperparameters init = config.inference.initial.value_or(default_initial(data));
  const FitResult fit = fit_hyperparameters(data, init, options);
  ctx.log("fit: restarts " + std::to_string(fit.restart_likelihoods.size()) + ", iterations " +
          std::to_string(fit.iterations) + ", evaluations " + std::to_string(fit.evaluations) +
          ", best restart " + std::to_string(fit.best_restart));
  ctx.stage("posterior");
  out.grid = fit.model->posterior_stress_grid(axes);
  out.record.hyperparameters = fit.hyperparameters;
  out.record.log_likelihood = fit.log_likelihood;
  out.record.jitter = fit.model->jitter();
  if (out.grid.floored_nodes > 0) {
    ctx.log("posterior variance floored at " + std::to_string(out.grid.floored_nodes) + " nodes");
  }
  return out;
}

std::string summary_text(const ExperimentConfig& config, const RunArtifacts& a) {
  std::string out;
  line(out, "name", config.name);
  line(out, "config_digest", a.config_digest);
  if (!a.dataset_digest.empty()) line(out, "dataset_digest", a.dataset_digest);
  line(out, "mode", mode_label(config.observation.mode));
  line(out, "noise.level", config.noise.level);
  line(out, "noise.seed", std::to_string(config.noise.seed));
  if (a.model) {
    const Hyperparameters& h = a.model->hyperparameters;
    for (const auto& [name, k] : {std::pair{"kernel_z", &h.kernel_z}, std::pair{"kernel_x", &h.kernel_x}}) {
      line(out, std::string(name) + ".signal_variance", k->signal_variance);
      for (int d = 0; d < 4; ++d) {
        line(out, std::string(name) + ".lengthscale_" + std::to_string(d + 1), k->lengthscales[d]);
      }
    }
    line(out, "noise_variance", h.noise_variance);
    line(out, "log_marginal_likelihood", a.model->log_likelihood);
    if (a.model->scaling) {
      line(out, "zeta_z", a.model->scaling->zeta_z);
      line(out, "zeta_x", a.model->scaling->zeta_x);
    }
  }
  if (a.metrics) out += format_metrics(*a.metrics, "full.");
  if (a.masked_metrics) out += format_metrics(*a.masked_metrics, "masked.");
  out += format_diagnostics(a.diagnostics, "sampling.");
  line(out, "warnings", std::to_string(a.warnings.size()));
  for (std::size_t i = 0; i < a.warnings.size(); ++i) {
    line(out, "warning_" + std::to_string(i + 1), a.warnings[i]);
  }
  return out;
}

void score(RunArtifacts& a, const ExperimentConfig& config, const PosteriorGrid& grid,
           const GridStressMap& truth_on_grid, const CompositeDataset& data) {
  a.metrics = reconstruction_metrics(grid.mean, truth_on_grid);
  const GridMask mask = sampled_region_mask(data, grid.mean.axes(), config.metrics.mask_radius);
  a.masked_metrics = reconstruction_metrics(grid.mean, truth_on_grid, mask);
}

void write_reconstruction(RunContext& ctx, const Reconstruction& rec) {
  ModelRecord record = rec.record;
  record.posterior_mean = rec.grid.mean;
  record.posterior_variance = variance_map(rec.grid);
  ctx.write("model.txt", format_model_record(record));
  ctx.write("reconstruction.csv", format_stress_map(rec.grid.mean));
  ctx.write("variance.csv", format_stress_map(*record.posterior_variance));
  ctx.write("reconstruction_z.svg",
            render_heatmap_svg(rec.grid.mean.values_z, rec.grid.mean.axes(), "alpha_z (N/m^3)"));
  ctx.write("reconstruction_x.svg",
            render_heatmap_svg(rec.grid.mean.values_x, rec.grid.mean.axes(), "alpha_x (N/m^3)"));
  ctx.artifacts.model = rec.record;
}

std::vector<std::vector<double>> column_trials(const std::vector<CsvTable>& tables,
                                               const std::string& name) {
  std::vector<std::vector<double>> out;
  for (const auto& t : tables) out.push_back(t.column(name));
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Field accessors shared by the sweep aggregation and its CSV output.
struct MetricField {
  const char* name;
  double ComponentMetrics::*member;
};

constexpr MetricField kMetricFields[] = {
    {"rmse", &ComponentMetrics::rmse},       {"mae", &ComponentMetrics::mae},
    {"r2", &ComponentMetrics::r2},           {"pearson", &ComponentMetrics::pearson},
    {"acr_pct", &ComponentMetrics::acr_pct}, {"rmse_pct", &ComponentMetrics::rmse_pct},
    {"mae_pct", &ComponentMetrics::mae_pct},
};

std::string metrics_header() {
  std::string h;
  for (const char* c : {"z", "x"}) {
    for (const auto& f : kMetricFields) h += std::string(",") + c + "_" + f.name;
  }
  return h;
}

std::string metrics_row(const MetricsReport& m) {
  std::string r;
  for (const ComponentMetrics* c : {&m.z, &m.x}) {
    for (const auto& f : kMetricFields) r += "," + format_double(c->*f.member);
  }
  return r;
}

}  // namespace

GridStressMap load_truth(const ExperimentConfig& config) {
  switch (config.truth.source) {
    case TruthSource::kPrior:
      return sample_prior_map(config.truth.prior, config.truth.prior, config.truth.seed,
                              uniform_axes(config.truth.beta_nodes, config.truth.gamma_nodes));
    case TruthSource::kFile:
      return read_stress_map(config.truth.path);
    case TruthSource::kScaledBase:
      return scale_map(read_stress_map(config.truth.path), config.truth.zeta_z,
                       config.truth.zeta_x);
  }
  throw Error(ErrorCode::kConfig, "unknown ground-truth source");
}

GridStressMap resample(const GridStressMap& map, const GridAxes& axes) {
  if (map.beta_axis == axes.beta && map.gamma_axis == axes.gamma) return map;
  GridStressMap out;
  out.beta_axis = axes.beta;
  out.gamma_axis = axes.gamma;
  const auto nb = static_cast<Eigen::Index>(axes.beta.size());
  const auto ng = static_cast<Eigen::Index>(axes.gamma.size());
  out.values_z.resize(nb, ng);
  out.values_x.resize(nb, ng);
  for (Eigen::Index i = 0; i < nb; ++i) {
    for (Eigen::Index j = 0; j < ng; ++j) {
      const StressValue v = eval_map(map, axes.beta[i], axes.gamma[j]);
      out.values_z(i, j) = v.z;
      out.values_x(i, j) = v.x;
    }
  }
  return out;
}

Simulation simulate_config(const ExperimentConfig& config) {
  Simulation sim;
  const Toe toe = make_toe(config.toe);
  const PoseSequence poses = make_trajectory(config.trajectory);
  sim.series = segment_states(toe, poses, config.surface_height);
  sim.truth = load_truth(config);
  ForwardOptions fwd;
  fwd.leading_edge_only = config.observation.leading_edge_only;
  sim.forces = forward_forces(sim.series, as_field(sim.truth), fwd);

  std::vector<std::vector<Eigen::MatrixX2d>> jacobians;
  std::vector<Eigen::VectorXd> clean = force_observations(sim.forces);
  if (config.observation.mode == ObservationMode::kTorque) {
    jacobians = torque_jacobians(sim.series, leg_mount(config, sim.series), &sim.joints);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      clean[i] = jacobians[i].front() * Eigen::Vector2d(clean[i][0], clean[i][1]);
    }
  }
  for (std::size_t i = 0; i < clean.size(); ++i) {
    sim.observations.push_back(
        inject_noise(clean[i], static_cast<int>(i), config.noise.level, config.noise.seed));
  }
  sim.dataset = assemble_dataset(contact_series(config, sim.series), sim.observations, 0.0,
                                 jacobians);
  sim.dataset.mode = config.observation.mode;
  return sim;
}

std::string format_model_record(const ModelRecord& r) {
  std::string out = "# rftgp fitted model\n";
  line(out, "format_version", std::to_string(r.format_version));
  line(out, "config_digest", r.config_digest);
  line(out, "dataset_digest", r.dataset_digest);
  line(out, "mode", mode_label(r.mode));
  const Hyperparameters& h = r.hyperparameters;
  for (const auto& [name, k] : {std::pair{"kernel_z", &h.kernel_z}, std::pair{"kernel_x", &h.kernel_x}}) {
    line(out, std::string(name) + ".signal_variance", k->signal_variance);
    for (int d = 0; d < 4; ++d) {
      line(out, std::string(name) + ".lengthscale_" + std::to_string(d + 1), k->lengthscales[d]);
    }
  }
  line(out, "noise_variance", h.noise_variance);
  line(out, "log_marginal_likelihood", r.log_likelihood);
  line(out, "jitter", r.jitter);
  if (r.scaling) {
    line(out, "zeta_z", r.scaling->zeta_z);
    line(out, "zeta_x", r.scaling->zeta_x);
  }
  if (r.posterior_mean) out += std::string(kMeanSection) + "\n" + format_stress_map(*r.posterior_mean);
  if (r.posterior_variance) {
    out += std::string(kVarianceSection) + "\n" + format_stress_map(*r.posterior_variance);
  }
  return out;
}

ModelRecord parse_model_record(const std::string& text, const std::string& origin) {
  const std::size_t mean_at = text.find(std::string(kMeanSection) + "\n");
  const std::size_t var_at = text.find(std::string(kVarianceSection) + "\n");
  const std::size_t header_end = std::min(mean_at, var_at);
  std::map<std::string, std::string> kv;
  std::istringstream in(text.substr(0, header_end));
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string l = trim(raw);
    if (l.empty() || l[0] == '#') continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kIo, origin + ": expected 'key = value': " + l);
    }
    kv[trim(l.substr(0, eq))] = trim(l.substr(eq + 1));
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::kIo, origin + ": missing " + key);
    return it->second;
  };
  ModelRecord r;
  r.format_version = static_cast<int>(parse_double(get("format_version")));
  if (r.format_version != 1) {
    throw Error(ErrorCode::kIo, origin + ": unsupported model format " + get("format_version"));
  }
  r.config_digest = get("config_digest");
  r.dataset_digest = get("dataset_digest");
  const std::string& mode = get("mode");
  if (mode != "force" && mode != "torque") {
    throw Error(ErrorCode::kIo, origin + ": unknown mode " + mode);
  }
  r.mode = mode == "force" ? ObservationMode::kForce : ObservationMode::kTorque;
  for (const auto& [name, k] : {std::pair{"kernel_z", &r.hyperparameters.kernel_z},
                                std::pair{"kernel_x", &r.hyperparameters.kernel_x}}) {
    k->signal_variance = parse_double(get(std::string(name) + ".signal_variance"));
    for (int d = 0; d < 4; ++d) {
      k->lengthscales[d] =
          parse_double(get(std::string(name) + ".lengthscale_" + std::to_string(d + 1)));
    }
  }
  r.hyperparameters.noise_variance = parse_double(get("noise_variance"));
  r.log_likelihood = parse_double(get("log_marginal_likelihood"));
  r.jitter = parse_double(get("jitter"));
  if (kv.count("zeta_z")) {
    r.scaling = ScalingFit{parse_double(get("zeta_z")), parse_double(get("zeta_x"))};
  }
  auto section = [&](std::size_t at, const char* tag) {
    const std::size_t begin = at + std::string(tag).size() + 1;
    const std::size_t end = at < var_at && var_at != std::string::npos ? var_at : text.size();
    return parse_stress_map(text.substr(begin, end - begin), origin);
  };
  if (mean_at != std::string::npos) r.posterior_mean = section(mean_at, kMeanSection);
  if (var_at != std::string::npos) r.posterior_variance = section(var_at, kVarianceSection);
  return r;
}

RunArtifacts simulate(const ExperimentConfig& config) {
  return guarded(config, [&](RunContext& ctx) {
    ctx.stage("config");
    validate(config);
    ctx.write("config.json", dump_config(config));
    ctx.stage("forward");
    const Simulation sim = simulate_config(config);
    ctx.artifacts.dataset_digest = hex64(dataset_digest(sim.dataset));
    ctx.write("segment_states.csv", segment_states_csv(sim.series));
    ctx.write("observations.csv", observations_csv(config, sim));
    const GridAxes axes = uniform_axes(config.grid_beta_nodes, config.grid_gamma_nodes);
    ctx.write("truth.csv", format_stress_map(resample(sim.truth, axes)));
    ctx.artifacts.diagnostics =
        sampling_diagnostics(sim.dataset, config.metrics.angle_quantum, config.metrics.coverage_bin);
    ctx.write("summary.txt", summary_text(config, ctx.artifacts));
  });
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  return guarded(config, [&](RunContext& ctx) {
    ctx.stage("config");
    validate(config);
    ctx.write("config.json", dump_config(config));
    ctx.stage("forward");
    const Simulation sim = simulate_config(config);
    ctx.artifacts.dataset_digest = hex64(dataset_digest(sim.dataset));
    ctx.write("segment_states.csv", segment_states_csv(sim.series));
    ctx.write("observations.csv", observations_csv(config, sim));
    const GridAxes axes = uniform_axes(config.grid_beta_nodes, config.grid_gamma_nodes);
    const GridStressMap truth = resample(sim.truth, axes);
    ctx.write("truth.csv", format_stress_map(truth));
    ctx.artifacts.diagnostics =
        sampling_diagnostics(sim.dataset, config.metrics.angle_quantum, config.metrics.coverage_bin);

    const Reconstruction rec = reconstruct(ctx, config, sim.dataset);
    ctx.stage("metrics");
    write_reconstruction(ctx, rec);
    score(ctx.artifacts, config, rec.grid, truth, sim.dataset);
    ctx.write("summary.txt", summary_text(config, ctx.artifacts));
  });
}

RunArtifacts invert(const ExperimentConfig& config) {
  return guarded(config, [&](RunContext& ctx) {
    ctx.stage("config");
    validate(config);
    if (config.observation.trials.empty()) {
      throw Error(ErrorCode::kConfig, "invert needs observation.trials");
    }
    ctx.write("config.json", dump_config(config));

    ctx.stage("ingest");
    std::vector<CsvTable> trials;
    std::vector<CsvTable> baselines;
    for (const auto& p : config.observation.trials) trials.push_back(read_csv_table(p));
    for (const auto& p : config.observation.baseline_trials) baselines.push_back(read_csv_table(p));
    const bool torque = config.observation.mode == ObservationMode::kTorque;
    const std::string a = torque ? "tau1_Nm" : "f_z_N";
    const std::string b = torque ? "tau2_Nm" : "f_x_N";
    const std::size_t rows = trials.front().rows();
    auto channel = [&](const std::string& name) {
      std::vector<std::vector<double>> base = column_trials(baselines, name);
      if (base.empty()) base.push_back(std::vector<double>(rows, 0.0));
      return preprocess_force_log(column_trials(trials, name), base,
                                  config.observation.smoothing_window);
    };
    const std::vector<double> ch0 = channel(a);
    const std::vector<double> ch1 = channel(b);

    ctx.stage("geometry");
    const Toe toe = make_toe(config.toe);
    const SegmentStateSeries series =
        segment_states(toe, make_trajectory(config.trajectory), config.surface_height);
    if (static_cast<int>(rows) != series.steps) {
      throw Error(ErrorCode::kDimension,
                  "observation log has " + std::to_string(rows) + " rows but the trajectory has " +
                      std::to_string(series.steps) + " samples");
    }
    ctx.write("segment_states.csv", segment_states_csv(series));

    std::vector<Eigen::VectorXd> obs;
    for (std::size_t i = 0; i < rows; ++i) obs.push_back(Eigen::Vector2d(ch0[i], ch1[i]));
    std::vector<std::vector<Eigen::MatrixX2d>> jacobians;
    if (torque) {
      const auto& phi1 = trials.front().column("phi1_rad");
      const auto& phi2 = trials.front().column("phi2_rad");
      for (std::size_t i = 0; i < rows; ++i) {
        const JointAngles q{phi1[i], phi2[i]};
        const Eigen::Matrix2d j = fivebar_jacobian(q, config.observation.leg);
        if (is_singular(j)) {
          ctx.warn("leg configuration at step " + std::to_string(i) + " is near singular");
        }
        jacobians.emplace_back(static_cast<std::size_t>(series.segments), torque_mixing(j));
      }
    }
    CompositeDataset data = assemble_dataset(contact_series(config, series), obs, 0.0, jacobians);
    data.mode = config.observation.mode;
    ctx.artifacts.dataset_digest = hex64(dataset_digest(data));
    ctx.artifacts.diagnostics =
        sampling_diagnostics(data, config.metrics.angle_quantum, config.metrics.coverage_bin);

    const Reconstruction rec = reconstruct(ctx, config, data);
    ctx.stage("output");
    write_reconstruction(ctx, rec);
    if (config.truth.source != TruthSource::kPrior) {
      const GridStressMap truth = resample(load_truth(config), rec.grid.mean.axes());
      ctx.write("truth.csv", format_stress_map(truth));
      score(ctx.artifacts, config, rec.grid, truth, data);
    }
    ctx.write("summary.txt", summary_text(config, ctx.artifacts));
  });
}

SweepResult sweep_noise(const ExperimentConfig& config, const std::vector<double>& levels,
                        const std::vector<std::uint64_t>& seeds) {
  for (double level : levels) {
    if (!(level >= 0.0)) throw Error(ErrorCode::kConfig, "noise levels must be >= 0");
  }
  if (levels.empty() || seeds.empty()) {
    throw Error(ErrorCode::kConfig, "sweep needs at least one level and one seed");
  }
  SweepResult result;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    SweepAggregate agg;
    agg.level = levels[li];
    std::vector<MetricsReport> runs;
    for (std::uint64_t seed : seeds) {
      ExperimentConfig cell = config;
      cell.noise.level = levels[li];
      cell.noise.seed = seed;
      cell.output_dir = (fs::path(config.output_dir) /
                         ("level" + std::to_string(li) + "_seed" + std::to_string(seed)))
                            .string();
      const RunArtifacts a = run_experiment(cell);
      result.cells.push_back({levels[li], seed, *a.metrics});
      runs.push_back(*a.metrics);
    }
    agg.runs = static_cast<int>(runs.size());
    for (auto [mean_c, sd_c, pick] :
         {std::tuple{&agg.mean.z, &agg.stddev.z, &MetricsReport::z},
          std::tuple{&agg.mean.x, &agg.stddev.x, &MetricsReport::x}}) {
      for (const auto& f : kMetricFields) {
        std::vector<double> v;
        for (const auto& r : runs) v.push_back((r.*pick).*f.member);
        mean_c->*f.member = mean_of(v);
        sd_c->*f.member = stddev_of(v);
      }
      mean_c->nodes = (runs.front().*pick).nodes;
      sd_c->nodes = mean_c->nodes;
    }
    result.aggregates.push_back(agg);
  }

  std::string cells = "level,seed" + metrics_header() + "\n";
  for (const auto& c : result.cells) {
    cells += format_double(c.level) + "," + std::to_string(c.seed) + metrics_row(c.metrics) + "\n";
  }
  std::string summary = "level,runs,statistic" + metrics_header() + "\n";
  for (const auto& a : result.aggregates) {
    const std::string head = format_double(a.level) + "," + std::to_string(a.runs);
    summary += head + ",mean" + metrics_row(a.mean) + "\n";
    summary += head + ",stddev" + metrics_row(a.stddev) + "\n";
  }
  write_text_file((fs::path(config.output_dir) / "sweep.csv").string(), cells);
  write_text_file((fs::path(config.output_dir) / "sweep_summary.csv").string(), summary);
  return result;
}

std::vector<CompareRow> compare_configs(const std::vector<ExperimentConfig>& configs,
                                        const std::string& output_dir) {
  std::vector<CompareRow> rows;
  for (const auto& c : configs) {
    ExperimentConfig run = c;
    run.output_dir = (fs::path(output_dir) / c.name).string();
    const RunArtifacts a = run_experiment(run);
    rows.push_back({c.name, a.config_digest, *a.metrics});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& l, const CompareRow& r) {
    return l.metrics.z.rmse < r.metrics.z.rmse;
  });
  std::string csv = "rank,name,config_digest" + metrics_header() + "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += std::to_string(i + 1) + "," + rows[i].name + "," + rows[i].config_digest +
           metrics_row(rows[i].metrics) + "\n";
  }
  write_text_file((fs::path(output_dir) / "compare.csv").string(), csv);
  return rows;
}

std::string format_compare_table(const std::vector<CompareRow>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-4s %-20s %-4s %12s %12s %10s %10s %9s\n", "rank", "config",
                "axis", "RMSE", "MAE", "R2", "Pearson", "ACR%");
  out += buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [axis, m] : {std::pair{"z", &rows[i].metrics.z}, std::pair{"x", &rows[i].metrics.x}}) {
      std::snprintf(buf, sizeof buf, "%-4zu %-20s %-4s %12.6g %12.6g %10.4f %10.4f %9.2f\n", i + 1,
                    rows[i].name.c_str(), axis, m->rmse, m->mae, m->r2, m->pearson, m->acr_pct);
      out += buf;
    }
  }
  return out;
}

}  // namespace rftgp
