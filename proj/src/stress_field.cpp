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

#include "rftgp/stress_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rftgp/cholesky.hpp"
#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"

namespace rftgp {
namespace {

constexpr double kPi = std::numbers::pi;

struct Cell {
  Eigen::Index index = 0;
  double t = 0.0;
};

Cell locate(const std::vector<double>& axis, double v) {
  const auto n = static_cast<Eigen::Index>(axis.size());
  if (n == 1) return {0, 0.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  Eigen::Index i = static_cast<Eigen::Index>(it - axis.begin()) - 1;
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  double t = (v - axis[i]) / (axis[i + 1] - axis[i]);
  return {i, std::clamp(t, 0.0, 1.0)};
}

double bilinear(const Eigen::MatrixXd& v, const Cell& b, const Cell& g) {
  const Eigen::Index i1 = std::min<Eigen::Index>(b.index + 1, v.rows() - 1);
  const Eigen::Index j1 = std::min<Eigen::Index>(g.index + 1, v.cols() - 1);
  const double r0 = (1.0 - g.t) * v(b.index, g.index) + g.t * v(b.index, j1);
  const double r1 = (1.0 - g.t) * v(i1, g.index) + g.t * v(i1, j1);
  return (1.0 - b.t) * r0 + b.t * r1;
}

bool spans_full_period(const std::vector<double>& axis) {
  return axis.size() >= 2 &&
         std::abs(axis.back() - axis.front() - kPi) <= 1e-12;
}

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) {
    throw Error(ErrorCode::kInvalidSpec, std::string("empty ") + name);
  }
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i]) || (i > 0 && !(axis[i] > axis[i - 1]))) {
      throw Error(ErrorCode::kInvalidSpec,
                  std::string(name) + " must be finite and strictly increasing");
    }
  }
}

std::vector<double> parse_axis_line(const std::string& line,
                                    const std::string& prefix,
                                    const std::string& origin) {
  if (line.rfind(prefix, 0) != 0) {
    throw Error(ErrorCode::kIo, origin + ": expected '" + prefix + "'");
  }
  std::vector<double> out;
  for (const auto& token : split(line.substr(prefix.size()))) {
    out.push_back(parse_double(token));
  }
  return out;
}

}  // namespace

GridAxes uniform_axes(int beta_nodes, int gamma_nodes) {
  if (beta_nodes < 2 || gamma_nodes < 2) {
    throw Error(ErrorCode::kInvalidSpec, "grid needs at least 2x2 nodes");
  }
  auto axis = [](int n) {
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = -0.5 * kPi + kPi * i / (n - 1);
    a.back() = 0.5 * kPi;
    return a;
  };
  return {axis(beta_nodes), axis(gamma_nodes)};
}

void validate(const GridStressMap& map) {
  check_axis(map.beta_axis, "beta axis");
  check_axis(map.gamma_axis, "gamma axis");
  const auto nb = static_cast<Eigen::Index>(map.beta_axis.size());
  const auto ng = static_cast<Eigen::Index>(map.gamma_axis.size());
  for (const auto* v : {&map.values_z, &map.values_x}) {
    if (v->rows() != nb || v->cols() != ng) {
      throw Error(ErrorCode::kDimension, "stress map shape does not match axes");
    }
    if (!v->allFinite()) {
      throw Error(ErrorCode::kInvalidSpec, "stress map has non-finite values");
    }
  }
}

StressValue eval_map(const GridStressMap& map, double beta, double gamma) {
  if (map.beta_axis.empty() || map.gamma_axis.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "stress map has empty axes");
  }
  const double b0 = map.beta_axis.front();
  const double b1 = map.beta_axis.back();
  if (beta < b0 || beta > b1) {
    double r = std::fmod(beta - b0, kPi);
    if (r < 0.0) r += kPi;
    beta = std::min(b0 + r, b1);
  }
  StressValue out;
  const double g0 = map.gamma_axis.front();
  const double g1 = map.gamma_axis.back();
  if (gamma < g0 || gamma > g1) {
    out.clamped = true;
    gamma = std::clamp(gamma, g0, g1);
  }
  const Cell b = locate(map.beta_axis, beta);
  const Cell g = locate(map.gamma_axis, gamma);
  out.z = bilinear(map.values_z, b, g);
  out.x = bilinear(map.values_x, b, g);
  return out;
}

StressField as_field(const GridStressMap& map) {
  return [map](double beta, double gamma) { return eval_map(map, beta, gamma); };
}

GridStressMap sample_prior_map(const KernelConfig& kernel_z,
                               const KernelConfig& kernel_x,
                               std::uint64_t seed, const GridAxes& axes) {
  validate(kernel_z);
  validate(kernel_x);
  check_axis(axes.beta, "beta axis");
  check_axis(axes.gamma, "gamma axis");
  if (axes.beta.size() > 64 || axes.gamma.size() > 64) {
    throw Error(ErrorCode::kInvalidSpec, "prior draws are limited to 64x64");
  }
  const auto nb = static_cast<Eigen::Index>(axes.beta.size());
  const auto ng = static_cast<Eigen::Index>(axes.gamma.size());
  const bool periodic = spans_full_period(axes.beta);
  const Eigen::Index unique_rows = periodic ? nb - 1 : nb;

  std::vector<Angles> nodes;
  for (Eigen::Index i = 0; i < unique_rows; ++i) {
    for (Eigen::Index j = 0; j < ng; ++j) {
      nodes.emplace_back(axes.beta[i], axes.gamma[j]);
    }
  }
  const Eigen::MatrixX4d features = embed_all(nodes);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](const KernelConfig& config) {
    Eigen::VectorXd xi(static_cast<Eigen::Index>(nodes.size()));
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = normal(rng);
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(nb, ng);
    if (config.signal_variance == 0.0) return values;
    const auto chol =
        factorize_with_jitter(kernel_matrix(features, features, config));
    const Eigen::VectorXd sample = chol.llt.matrixL() * xi;
    for (Eigen::Index i = 0; i < unique_rows; ++i) {
      for (Eigen::Index j = 0; j < ng; ++j) values(i, j) = sample[i * ng + j];
    }
    if (periodic) values.row(nb - 1) = values.row(0);
    return values;
  };

  GridStressMap map;
  map.beta_axis = axes.beta;
  map.gamma_axis = axes.gamma;
  map.values_z = draw(kernel_z);
  map.values_x = draw(kernel_x);
  return map;
}

GridStressMap scale_map(const GridStressMap& base, double zeta_z,
                        double zeta_x) {
  GridStressMap out = base;
  out.values_z *= zeta_z;
  out.values_x *= zeta_x;
  return out;
}

StressValue ScaledBaseMap::operator()(double beta, double gamma) const {
  StressValue v = eval_map(base, beta, gamma);
  v.z *= zeta_z;
  v.x *= zeta_x;
  if (residual) {
    const StressValue r = residual(beta, gamma);
    v.z += r.z;
    v.x += r.x;
  }
  return v;
}

std::string format_stress_map(const GridStressMap& map) {
  std::string out = "# beta_axis: " + join_doubles(map.beta_axis) + "\n";
  out += "# gamma_axis: " + join_doubles(map.gamma_axis) + "\n";
  auto block = [&](const char* label, const Eigen::MatrixXd& v) {
    out += label;
    out += '\n';
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        if (j > 0) out += ',';
        out += format_double(v(i, j));
      }
      out += '\n';
    }
  };
  block("# values_z", map.values_z);
  block("# values_x", map.values_x);
  return out;
}

GridStressMap parse_stress_map(const std::string& text,
                               const std::string& origin) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (!t.empty()) lines.push_back(t);
  }
  if (lines.size() < 4) {
    throw Error(ErrorCode::kIo, origin + ": truncated stress map");
  }
  GridStressMap map;
  map.beta_axis = parse_axis_line(lines[0], "# beta_axis:", origin);
  map.gamma_axis = parse_axis_line(lines[1], "# gamma_axis:", origin);
  const auto nb = static_cast<Eigen::Index>(map.beta_axis.size());
  const auto ng = static_cast<Eigen::Index>(map.gamma_axis.size());
  std::size_t cursor = 2;
  auto block = [&](const char* label, Eigen::MatrixXd& v) {
    if (cursor >= lines.size() || lines[cursor] != label) {
      throw Error(ErrorCode::kIo, origin + ": expected '" + label + "'");
    }
    ++cursor;
    v.resize(nb, ng);
    for (Eigen::Index i = 0; i < nb; ++i, ++cursor) {
      if (cursor >= lines.size()) {
        throw Error(ErrorCode::kIo, origin + ": truncated block " + label);
      }
      auto tokens = split(lines[cursor]);
      if (static_cast<Eigen::Index>(tokens.size()) != ng) {
        throw Error(ErrorCode::kIo, origin + ": row width mismatch in " +
                                        std::string(label));
      }
      for (Eigen::Index j = 0; j < ng; ++j) v(i, j) = parse_double(tokens[j]);
    }
  };
  block("# values_z", map.values_z);
  block("# values_x", map.values_x);
  validate(map);
  return map;
}

void write_stress_map(const std::string& path, const GridStressMap& map) {
  write_text_file(path, format_stress_map(map));
}

GridStressMap read_stress_map(const std::string& path) {
  return parse_stress_map(read_text_file(path), path);
}

}  // namespace rftgp
