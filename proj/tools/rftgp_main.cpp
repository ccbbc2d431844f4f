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


// Command-line front end for the rftgp workbench.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rftgp/config.hpp"
#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"
#include "rftgp/heatmap.hpp"
#include "rftgp/stress_field.hpp"
#include "rftgp/workbench.hpp"

namespace {

using namespace rftgp;

struct CommonFlags {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string grid;
  std::string mode;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--preset", f.preset,
                  "Reference setup: i_toe_gait1, i_toe_gait2, c_toe_gait1, c_toe_gait2");
  cmd->add_option("--out", f.out, "Output directory (overrides output_dir)");
  cmd->add_option("--seed", f.seed, "Noise seed (overrides noise.seed)");
  cmd->add_option("--grid", f.grid, "Reconstruction grid as <n>x<n>");
  cmd->add_option("--mode", f.mode, "Observation mode: force or torque");
}

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const int a = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string rest = text.substr(x + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::exception&) {
    throw Error(ErrorCode::kConfig, "--grid expects <n>x<n>, got '" + text + "'");
  }
}

ExperimentConfig resolve(const CommonFlags& f) {
  if (!f.config.empty() && !f.preset.empty()) {
    throw Error(ErrorCode::kConfig, "use either --config or --preset, not both");
  }
  ExperimentConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
  } else if (!f.preset.empty()) {
    c = reference_config(f.preset);
  } else {
    throw Error(ErrorCode::kConfig, "a --config or --preset is required");
  }
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.seed) c.noise.seed = *f.seed;
  if (!f.grid.empty()) std::tie(c.grid_beta_nodes, c.grid_gamma_nodes) = parse_grid(f.grid);
  if (!f.mode.empty()) {
    if (f.mode == "force") {
      c.observation.mode = ObservationMode::kForce;
    } else if (f.mode == "torque") {
      c.observation.mode = ObservationMode::kTorque;
    } else {
      throw Error(ErrorCode::kConfig, "--mode must be force or torque");
    }
  }
  validate(c);
  return c;
}

void report(const RunArtifacts& a) {
  std::cout << "output_dir = " << a.directory << "\n";
  std::cout << "config_digest = " << a.config_digest << "\n";
  if (a.metrics) std::cout << format_metrics(*a.metrics, "full.");
  if (a.masked_metrics) std::cout << format_metrics(*a.masked_metrics, "masked.");
  std::cout << format_diagnostics(a.diagnostics, "sampling.");
  for (const auto& w : a.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stress-map inference from composite force and torque observations"};
  app.require_subcommand(1);

  CommonFlags simulate_flags, invert_flags, run_flags, sweep_flags;
  auto* simulate_cmd = app.add_subcommand("simulate", "Forward model only");
  add_common(simulate_cmd, simulate_flags);
  auto* invert_cmd = app.add_subcommand("invert", "Fit and reconstruct from observation logs");
  add_common(invert_cmd, invert_flags);
  auto* run_cmd = app.add_subcommand("run", "Full synthetic pipeline");
  add_common(run_cmd, run_flags);

  auto* sweep_cmd = app.add_subcommand("sweep-noise", "Noise-level sweep over seeds");
  add_common(sweep_cmd, sweep_flags);
  std::vector<double> levels;
  std::vector<std::uint64_t> seeds;
  sweep_cmd->add_option("--levels", levels, "Noise levels (overrides sweep.levels)")->delimiter(',');
  sweep_cmd->add_option("--seeds", seeds, "Noise seeds (overrides sweep.seeds)")->delimiter(',');

  auto* compare_cmd = app.add_subcommand("compare", "Rank configs by z-axis RMSE");
  std::vector<std::string> compare_configs_in;
  std::string compare_out = "runs/compare";
  std::string compare_grid;
  std::string compare_mode;
  compare_cmd->add_option("--config", compare_configs_in,
                          "Config files; the four reference setups when omitted");
  compare_cmd->add_option("--out", compare_out, "Output directory");
  compare_cmd->add_option("--grid", compare_grid, "Reconstruction grid as <n>x<n>");
  compare_cmd->add_option("--mode", compare_mode, "Observation mode: force or torque");

  auto* export_cmd = app.add_subcommand("export", "Render a stress-map file");
  std::string export_map;
  std::string export_out;
  std::string export_format = "svg";
  std::string export_component = "z";
  export_cmd->add_option("--map", export_map, "Stress-map CSV")->required();
  export_cmd->add_option("--out", export_out, "Output file")->required();
  export_cmd->add_option("--format", export_format, "svg or csv")
      ->check(CLI::IsMember({"svg", "csv"}));
  export_cmd->add_option("--component", export_component, "z or x")
      ->check(CLI::IsMember({"z", "x"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) {
      report(simulate(resolve(simulate_flags)));
    } else if (*invert_cmd) {
      report(invert(resolve(invert_flags)));
    } else if (*run_cmd) {
      report(run_experiment(resolve(run_flags)));
    } else if (*sweep_cmd) {
      const ExperimentConfig c = resolve(sweep_flags);
      const SweepResult r = sweep_noise(c, levels.empty() ? c.sweep.levels : levels,
                                        seeds.empty() ? c.sweep.seeds : seeds);
      for (const auto& a : r.aggregates) {
        std::cout << "level = " << format_double(a.level) << ", runs = " << a.runs
                  << ", z_rmse_mean = " << format_double(a.mean.z.rmse)
                  << ", x_rmse_mean = " << format_double(a.mean.x.rmse) << "\n";
      }
    } else if (*compare_cmd) {
      std::vector<ExperimentConfig> configs;
      if (compare_configs_in.empty()) {
        configs = reference_configs();
      } else {
        for (const auto& p : compare_configs_in) configs.push_back(load_config(p));
      }
      for (auto& c : configs) {
        if (!compare_grid.empty()) {
          std::tie(c.grid_beta_nodes, c.grid_gamma_nodes) = parse_grid(compare_grid);
        }
        if (compare_mode == "torque") c.observation.mode = ObservationMode::kTorque;
        else if (compare_mode == "force") c.observation.mode = ObservationMode::kForce;
        else if (!compare_mode.empty()) throw Error(ErrorCode::kConfig, "--mode must be force or torque");
        validate(c);
      }
      std::cout << format_compare_table(compare_configs(configs, compare_out));
    } else if (*export_cmd) {
      const GridStressMap map = read_stress_map(export_map);
      export_heatmap(map, export_out,
                     export_format == "svg" ? HeatmapFormat::kSvg : HeatmapFormat::kCsv,
                     export_component == "z" ? Component::kZ : Component::kX);
      std::cout << "wrote " << export_out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
