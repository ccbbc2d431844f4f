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

#include "rftgp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"

namespace rftgp {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ComponentMetrics component_metrics(const Eigen::MatrixXd& est,
                                   const Eigen::MatrixXd& truth,
                                   const GridMask& mask) {
  ComponentMetrics m;
  const double range = truth.maxCoeff() - truth.minCoeff();
  std::vector<double> e;
  std::vector<double> t;
  for (Eigen::Index j = 0; j < truth.cols(); ++j) {
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
      if (!mask(i, j)) continue;
      e.push_back(est(i, j));
      t.push_back(truth(i, j));
    }
  }
  m.nodes = static_cast<int>(t.size());
  if (t.empty()) {
    m.rmse = m.mae = m.rmse_pct = m.mae_pct = m.r2 = m.pearson = m.acr_pct = kNaN;
    return m;
  }
  const double n = static_cast<double>(t.size());
  double sq = 0.0;
  double abs_sum = 0.0;
  double mean_e = 0.0;
  double mean_t = 0.0;
  int within = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double err = e[k] - t[k];
    sq += err * err;
    abs_sum += std::abs(err);
    mean_e += e[k];
    mean_t += t[k];
    if (std::abs(err) <= 0.05 * range) ++within;
  }
  mean_e /= n;
  mean_t /= n;
  m.rmse = std::sqrt(sq / n);
  m.mae = abs_sum / n;
  if (range > 0.0) {
    m.rmse_pct = 100.0 * m.rmse / range;
    m.mae_pct = 100.0 * m.mae / range;
    m.acr_pct = 100.0 * within / n;
  } else {
    m.normalized_defined = false;
    m.rmse_pct = m.mae_pct = m.acr_pct = kNaN;
  }
  double see = 0.0;
  double stt = 0.0;
  double set = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double de = e[k] - mean_e;
    const double dt = t[k] - mean_t;
    see += de * de;
    stt += dt * dt;
    set += de * dt;
  }
  m.r2 = stt > 0.0 ? 1.0 - sq / stt : kNaN;
  m.pearson = (see > 0.0 && stt > 0.0)
                  ? std::clamp(set / std::sqrt(see * stt), -1.0, 1.0)
                  : kNaN;
  return m;
}

void append(std::string& out, const std::string& key, double value) {
  out += key + " = " + format_double(value) + "\n";
}

}  // namespace

MetricsReport reconstruction_metrics(const GridStressMap& estimate,
                                     const GridStressMap& truth,
                                     const std::optional<GridMask>& mask) {
  validate(estimate);
  validate(truth);
  if (estimate.beta_axis != truth.beta_axis ||
      estimate.gamma_axis != truth.gamma_axis) {
    throw Error(ErrorCode::kDimension, "estimate and truth grids use different axes");
  }
  const GridMask full = GridMask::Constant(truth.values_z.rows(),
                                           truth.values_z.cols(), true);
  const GridMask& use = mask ? *mask : full;
  if (use.rows() != full.rows() || use.cols() != full.cols()) {
    throw Error(ErrorCode::kDimension, "mask shape does not match the grid");
  }
  return {component_metrics(estimate.values_z, truth.values_z, use),
          component_metrics(estimate.values_x, truth.values_x, use)};
}

GridMask sampled_region_mask(const CompositeDataset& data, const GridAxes& axes,
                             double radius) {
  const auto nb = static_cast<Eigen::Index>(axes.beta.size());
  const auto ng = static_cast<Eigen::Index>(axes.gamma.size());
  GridMask mask = GridMask::Constant(nb, ng, false);
  std::set<std::pair<double, double>> samples;
  for (const auto& step : data.steps) {
    for (std::size_t m = 0; m < step.weights.size(); ++m) {
      if (step.weights[m] != 0.0) {
        samples.emplace(step.angles[m].x(), step.angles[m].y());
      }
    }
  }
  const double r2 = radius * radius;
  for (Eigen::Index i = 0; i < nb; ++i) {
    for (Eigen::Index j = 0; j < ng; ++j) {
      for (const auto& [b, g] : samples) {
        double db = std::fmod(std::abs(axes.beta[i] - b), kPi);
        db = std::min(db, kPi - db);
        const double dg = axes.gamma[j] - g;
        if (db * db + dg * dg <= r2) {
          mask(i, j) = true;
          break;
        }
      }
    }
  }
  return mask;
}

SamplingDiagnostics sampling_diagnostics(const CompositeDataset& data,
                                         double angle_quantum, double bin_size) {
  if (!(angle_quantum > 0.0) || !(bin_size > 0.0)) {
    throw Error(ErrorCode::kInvalidSpec, "quantum and bin size must be positive");
  }
  const long long period = std::llround(kPi / angle_quantum);
  const int bins = static_cast<int>(std::ceil(kPi / bin_size - 1e-9));
  std::set<std::pair<long long, long long>> unique;
  std::set<std::pair<int, int>> occupied;
  SamplingDiagnostics d;
  for (const auto& step : data.steps) {
    for (std::size_t m = 0; m < step.weights.size(); ++m) {
      if (step.weights[m] == 0.0) continue;
      const double beta = step.angles[m].x();
      const double gamma = step.angles[m].y();
      ++d.total_samples;
      long long qb = std::llround(beta / angle_quantum);
      if (period > 0) qb = ((qb % period) + period) % period;
      unique.emplace(qb, std::llround(gamma / angle_quantum));
      const int ib = std::clamp(
          static_cast<int>(std::floor((normalize_beta(beta) + 0.5 * kPi) / bin_size)),
          0, bins - 1);
      const int ig = std::clamp(
          static_cast<int>(std::floor((gamma + 0.5 * kPi) / bin_size)), 0,
          bins - 1);
      occupied.emplace(ib, ig);
      if (gamma > kPi / 3.0) ++d.sign_region_hits;
    }
  }
  d.unique_samples = static_cast<int>(unique.size());
  d.redundancy = d.total_samples > 0
                     ? 1.0 - static_cast<double>(d.unique_samples) / d.total_samples
                     : 0.0;
  d.coverage_bins = static_cast<int>(occupied.size());
  d.coverage_area = d.coverage_bins * bin_size * bin_size;
  return d;
}

std::string format_metrics(const MetricsReport& report, const std::string& prefix) {
  std::string out;
  for (const auto& [name, m] : {std::pair{"z", &report.z}, std::pair{"x", &report.x}}) {
    const std::string p = prefix + name + ".";
    append(out, p + "rmse", m->rmse);
    append(out, p + "mae", m->mae);
    append(out, p + "r2", m->r2);
    append(out, p + "pearson", m->pearson);
    append(out, p + "acr_pct", m->acr_pct);
    append(out, p + "rmse_pct", m->rmse_pct);
    append(out, p + "mae_pct", m->mae_pct);
    append(out, p + "nodes", m->nodes);
  }
  return out;
}

std::string format_diagnostics(const SamplingDiagnostics& d,
                               const std::string& prefix) {
  std::string out;
  append(out, prefix + "redundancy", d.redundancy);
  append(out, prefix + "unique_samples", d.unique_samples);
  append(out, prefix + "total_samples", d.total_samples);
  append(out, prefix + "coverage_bins", d.coverage_bins);
  append(out, prefix + "coverage_area", d.coverage_area);
  append(out, prefix + "sign_region_hits", d.sign_region_hits);
  return out;
}

}  // namespace rftgp
