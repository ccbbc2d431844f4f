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

#include "rftgp/inverse_gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rftgp/error.hpp"
#include "rftgp/optimizer.hpp"

#include <Eigen/LU>

namespace rftgp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void symmetrize(Eigen::MatrixXd& c) {
  c = (0.5 * (c + c.transpose())).eval();
}

Eigen::MatrixXd project_kernel(const Eigen::SparseMatrix<double>& w,
                               const Eigen::MatrixXd& k) {
  if (w.cols() == 0) return Eigen::MatrixXd::Zero(w.rows(), w.rows());
  const Eigen::MatrixXd kwt = k * w.transpose();
  return w * kwt;
}

struct Scales {
  double observation = 1.0;
  double stress = 1.0;
};

Scales data_scales(const CompositeOperator& op) {
  Scales s;
  const Eigen::VectorXd& f = op.observations();
  if (f.size() > 0) {
    const double rms = std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
    if (rms > 0.0 && std::isfinite(rms)) s.observation = rms;
  }
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(op.observation_count());
  for (auto comp : {Component::kZ, Component::kX}) {
    const auto& w = op.weights(comp);
    for (int k = 0; k < w.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(w, k); it; ++it) {
        rows[it.row()] += std::abs(it.value());
      }
    }
  }
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < rows.size(); ++i) {
    if (rows[i] > 0.0) {
      sum += rows[i] * rows[i];
      ++count;
    }
  }
  const double weight_scale = count > 0 ? std::sqrt(sum / count) : 1.0;
  s.stress = s.observation / weight_scale;
  return s;
}

// Halton radical inverse.
double halton(std::uint64_t index, int base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

}  // namespace

void validate(const Hyperparameters& hyper) {
  validate(hyper.kernel_z);
  validate(hyper.kernel_x);
  if (!(hyper.noise_variance >= 0.0) || !std::isfinite(hyper.noise_variance)) {
    throw Error(ErrorCode::kInvalidSpec, "noise variance must be non-negative");
  }
}

CompositeOperator::CompositeOperator(const CompositeDataset& data)
    : channels_(data.channels) {
  const auto t = static_cast<Eigen::Index>(data.size());
  const Eigen::Index rows = t * channels_;
  observations_.resize(rows);
  std::vector<Eigen::Triplet<double>> tz;
  std::vector<Eigen::Triplet<double>> tx;
  for (Eigen::Index p = 0; p < t; ++p) {
    const auto& step = data.steps[p];
    if (step.observation.size() != channels_) {
      throw Error(ErrorCode::kDimension, "observation channel count mismatch");
    }
    if (step.angles.size() != step.weights.size()) {
      throw Error(ErrorCode::kDimension, "angle and weight lists differ in length");
    }
    if (!step.mixing.empty() && step.mixing.size() != step.weights.size()) {
      throw Error(ErrorCode::kDimension, "one mixing matrix per segment required");
    }
    observations_.segment(p * channels_, channels_) = step.observation;
    for (std::size_t m = 0; m < step.weights.size(); ++m) {
      const double w = step.weights[m];
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::kInvalidSpec, "non-finite segment weight");
      }
      if (w == 0.0) continue;
      const Eigen::MatrixX2d mix = data.mixing(p, m);
      if (mix.rows() != channels_) {
        throw Error(ErrorCode::kDimension, "mixing matrix has wrong row count");
      }
      const auto j = static_cast<int>(points_.size());
      points_.push_back(step.angles[m]);
      for (int c = 0; c < channels_; ++c) {
        const auto row = static_cast<int>(p * channels_ + c);
        if (mix(c, 0) != 0.0) tz.emplace_back(row, j, w * mix(c, 0));
        if (mix(c, 1) != 0.0) tx.emplace_back(row, j, w * mix(c, 1));
      }
    }
  }
  if (!observations_.allFinite()) {
    throw Error(ErrorCode::kInvalidSpec, "non-finite observations");
  }
  const auto cols = static_cast<Eigen::Index>(points_.size());
  w_z_.resize(rows, cols);
  w_x_.resize(rows, cols);
  w_z_.setFromTriplets(tz.begin(), tz.end());
  w_x_.setFromTriplets(tx.begin(), tx.end());
  features_ = embed_all(points_);
}

Eigen::MatrixXd assemble_covariance(const CompositeOperator& op,
                                    const Hyperparameters& hyper) {
  const auto& f = op.features();
  Eigen::MatrixXd c =
      project_kernel(op.weights(Component::kZ), kernel_matrix(f, f, hyper.kernel_z)) +
      project_kernel(op.weights(Component::kX), kernel_matrix(f, f, hyper.kernel_x));
  c.diagonal().array() += hyper.noise_variance;
  symmetrize(c);
  return c;
}

Eigen::MatrixXd assemble_covariance(const CompositeDataset& data,
                                    const Hyperparameters& hyper) {
  validate(hyper);
  return assemble_covariance(CompositeOperator(data), hyper);
}

GpModel::GpModel(const CompositeDataset& data, const Hyperparameters& hyper)
    : GpModel(std::make_shared<const CompositeOperator>(data), hyper) {}

GpModel::GpModel(std::shared_ptr<const CompositeOperator> op,
                 const Hyperparameters& hyper)
    : op_(std::move(op)), hyper_(hyper) {
  validate(hyper_);
  factorize();
}

void GpModel::factorize() {
  const Eigen::Index n = op_->observation_count();
  if (n == 0) {
    projected_z_ = Eigen::VectorXd::Zero(op_->latent_count());
    projected_x_ = Eigen::VectorXd::Zero(op_->latent_count());
    return;
  }
  covariance_ = assemble_covariance(*op_, hyper_);
  chol_ = factorize_with_jitter(covariance_);
  solved_ = chol_.llt.solve(op_->observations());
  projected_z_ = op_->weights(Component::kZ).transpose() * solved_;
  projected_x_ = op_->weights(Component::kX).transpose() * solved_;
}

double GpModel::solve_residual() const {
  const Eigen::VectorXd& f = op_->observations();
  if (f.size() == 0) return 0.0;
  const Eigen::VectorXd r =
      covariance_ * solved_ + chol_.jitter * solved_ - f;
  const double norm = f.norm();
  return norm > 0.0 ? r.norm() / norm : r.norm();
}

StressPosterior GpModel::posterior_stress(const Angles& theta,
                                          Component c) const {
  const KernelConfig& k = kernel(c);
  StressPosterior out;
  const double prior = k.signal_variance;
  if (op_->observation_count() == 0) {
    out.variance = prior;
    return out;
  }
  Eigen::MatrixX4d row(1, 4);
  row.row(0) = embed(theta).transpose();
  const Eigen::MatrixXd kstar = kernel_matrix(row, op_->features(), k);
  const Eigen::VectorXd& proj = c == Component::kZ ? projected_z_ : projected_x_;
  out.mean = (kstar * proj)(0, 0);
  Eigen::MatrixXd u = op_->weights(c) * kstar.transpose();
  chol_.llt.matrixL().solveInPlace(u);
  out.variance = prior - u.squaredNorm();
  if (out.variance < 0.0) {
    out.variance = 0.0;
    out.floored = true;
  }
  return out;
}

PosteriorGrid GpModel::posterior_stress_grid(const GridAxes& axes) const {
  const auto nb = static_cast<Eigen::Index>(axes.beta.size());
  const auto ng = static_cast<Eigen::Index>(axes.gamma.size());
  std::vector<Angles> nodes;
  nodes.reserve(static_cast<std::size_t>(nb * ng));
  for (Eigen::Index i = 0; i < nb; ++i) {
    for (Eigen::Index j = 0; j < ng; ++j) {
      nodes.emplace_back(axes.beta[i], axes.gamma[j]);
    }
  }
  const Eigen::MatrixX4d grid = embed_all(nodes);

  PosteriorGrid out;
  out.mean.beta_axis = axes.beta;
  out.mean.gamma_axis = axes.gamma;
  auto fill = [&](Component c, Eigen::MatrixXd& mean, Eigen::MatrixXd& var) {
    const KernelConfig& k = kernel(c);
    mean = Eigen::MatrixXd::Zero(nb, ng);
    var = Eigen::MatrixXd::Constant(nb, ng, k.signal_variance);
    if (op_->observation_count() == 0) return;
    const Eigen::MatrixXd kstar = kernel_matrix(grid, op_->features(), k);
    const Eigen::VectorXd& proj = c == Component::kZ ? projected_z_ : projected_x_;
    const Eigen::VectorXd mu = kstar * proj;
    Eigen::MatrixXd u = op_->weights(c) * kstar.transpose();
    chol_.llt.matrixL().solveInPlace(u);
    const Eigen::VectorXd reduction = u.colwise().squaredNorm().transpose();
    for (Eigen::Index i = 0; i < nb; ++i) {
      for (Eigen::Index j = 0; j < ng; ++j) {
        const Eigen::Index node = i * ng + j;
        mean(i, j) = mu[node];
        double v = k.signal_variance - reduction[node];
        if (v < 0.0) {
          v = 0.0;
          ++out.floored_nodes;
        }
        var(i, j) = v;
      }
    }
  };
  fill(Component::kZ, out.mean.values_z, out.variance_z);
  fill(Component::kX, out.mean.values_x, out.variance_x);
  return out;
}

ForcePosterior GpModel::posterior_force(const std::vector<Angles>& angles,
                                        const std::vector<double>& weights) const {
  if (angles.size() != weights.size()) {
    throw Error(ErrorCode::kDimension, "angle and weight lists differ in length");
  }
  ForcePosterior out;
  for (std::size_t m = 0; m < angles.size(); ++m) {
    const double w = weights[m];
    if (w == 0.0) continue;
    const StressPosterior z = posterior_stress(angles[m], Component::kZ);
    const StressPosterior x = posterior_stress(angles[m], Component::kX);
    out.mean += w * Eigen::Vector2d(z.mean, x.mean);
    out.variance += w * w * Eigen::Vector2d(z.variance, x.variance);
  }
  return out;
}

double GpModel::log_marginal_likelihood() const {
  const Eigen::Index n = op_->observation_count();
  if (n == 0) return 0.0;
  const double fit = op_->observations().dot(solved_);
  const double logdet =
      2.0 * chol_.llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * fit - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
}

Eigen::VectorXd pack_log_parameters(const Hyperparameters& hyper, bool shared) {
  auto put = [](Eigen::VectorXd& v, Eigen::Index at, const KernelConfig& k) {
    v[at] = std::log(k.signal_variance);
    for (int d = 0; d < 4; ++d) v[at + 1 + d] = std::log(k.lengthscales[d]);
  };
  Eigen::VectorXd p(shared ? 6 : 11);
  put(p, 0, hyper.kernel_z);
  if (!shared) put(p, 5, hyper.kernel_x);
  p[p.size() - 1] = std::log(hyper.noise_variance);
  return p;
}

Hyperparameters unpack_log_parameters(const Eigen::VectorXd& p, bool shared) {
  auto get = [&p](Eigen::Index at) {
    KernelConfig k;
    k.signal_variance = std::exp(p[at]);
    for (int d = 0; d < 4; ++d) k.lengthscales[d] = std::exp(p[at + 1 + d]);
    return k;
  };
  Hyperparameters h;
  h.kernel_z = get(0);
  h.kernel_x = shared ? h.kernel_z : get(5);
  h.noise_variance = std::exp(p[p.size() - 1]);
  return h;
}

double log_marginal_likelihood(const CompositeDataset& data,
                               const Hyperparameters& hyper) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "log marginal likelihood needs data");
  }
  return GpModel(data, hyper).log_marginal_likelihood();
}

LikelihoodEvaluator::LikelihoodEvaluator(
    std::shared_ptr<const CompositeOperator> op, bool shared)
    : op_(std::move(op)), shared_(shared) {}

namespace {

// Symmetric kernel over the latent features, filling both triangles from one
// pass over the upper one.
Eigen::MatrixXd latent_kernel(const Eigen::MatrixX4d& f, const KernelConfig& k) {
  const Eigen::Index j = f.rows();
  Eigen::Array4d inv;
  for (int d = 0; d < 4; ++d) inv[d] = 1.0 / (k.lengthscales[d] * k.lengthscales[d]);
  Eigen::MatrixXd out(j, j);
  for (Eigen::Index b = 0; b < j; ++b) {
    const Eigen::Array4d fb = f.row(b).transpose().array();
    for (Eigen::Index a = 0; a <= b; ++a) {
      const Eigen::Array4d diff = f.row(a).transpose().array() - fb;
      const double r2 = (diff * diff * inv).sum();
      const double v = k.signal_variance * std::exp(-0.5 * r2);
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return out;
}

}  // namespace

LikelihoodValue LikelihoodEvaluator::evaluate(const Hyperparameters& hyper,
                                              bool with_gradient) const {
  validate(hyper);
  const Eigen::Index n = op_->observation_count();
  const Eigen::Index j = op_->latent_count();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidSpec, "log marginal likelihood needs data");
  }
  const Eigen::MatrixXd kz = latent_kernel(op_->features(), hyper.kernel_z);
  const Eigen::MatrixXd kx = latent_kernel(op_->features(), hyper.kernel_x);
  Eigen::MatrixXd c = project_kernel(op_->weights(Component::kZ), kz) +
                      project_kernel(op_->weights(Component::kX), kx);
  c.diagonal().array() += hyper.noise_variance;
  symmetrize(c);
  const JitteredCholesky chol = factorize_with_jitter(c);
  const Eigen::VectorXd& f = op_->observations();
  const Eigen::VectorXd alpha = chol.llt.solve(f);
  const double logdet = 2.0 * chol.llt.matrixLLT().diagonal().array().log().sum();

  LikelihoodValue out;
  out.value = -0.5 * f.dot(alpha) - 0.5 * logdet -
              0.5 * static_cast<double>(n) * kLog2Pi;
  if (!with_gradient) return out;

  // dL/dtheta = 1/2 tr((alpha alpha^T - C^{-1}) dC/dtheta).
  Eigen::MatrixXd a = chol.llt.solve(Eigen::MatrixXd::Identity(n, n));
  a = (alpha * alpha.transpose() - a).eval();
  auto kernel_gradient = [&](Component comp, const Eigen::MatrixXd& k,
                             const KernelConfig& cfg) {
    Eigen::Matrix<double, 5, 1> g = Eigen::Matrix<double, 5, 1>::Zero();
    if (j == 0) return g;
    const auto& w = op_->weights(comp);
    const Eigen::MatrixXd aw = a * w;
    const Eigen::MatrixXd b = w.transpose() * aw;
    // B is symmetric, so each off-diagonal pair counts twice.
    const Eigen::MatrixX4d& f = op_->features();
    double total = 0.0;
    Eigen::Array4d moment = Eigen::Array4d::Zero();
    for (Eigen::Index col = 0; col < j; ++col) {
      const Eigen::Array4d fc = f.row(col).transpose().array();
      total += b(col, col) * k(col, col);
      for (Eigen::Index row = 0; row < col; ++row) {
        const double bk = 2.0 * b(row, col) * k(row, col);
        const Eigen::Array4d diff = f.row(row).transpose().array() - fc;
        total += bk;
        moment += bk * diff * diff;
      }
    }
    g[0] = 0.5 * total;
    for (int d = 0; d < 4; ++d) {
      const double l2 = cfg.lengthscales[d] * cfg.lengthscales[d];
      g[1 + d] = 0.5 * moment[d] / l2;
    }
    return g;
  };
  const auto gz = kernel_gradient(Component::kZ, kz, hyper.kernel_z);
  const auto gx = kernel_gradient(Component::kX, kx, hyper.kernel_x);
  out.gradient.resize(shared_ ? 6 : 11);
  if (shared_) {
    out.gradient.head<5>() = gz + gx;
  } else {
    out.gradient.head<5>() = gz;
    out.gradient.segment<5>(5) = gx;
  }
  out.gradient[out.gradient.size() - 1] = 0.5 * hyper.noise_variance * a.trace();
  return out;
}

HyperBounds default_bounds(const CompositeDataset& data) {
  const Scales s = data_scales(CompositeOperator(data));
  HyperBounds b;
  b.signal_lower = 1e-4 * s.stress * s.stress;
  b.signal_upper = 1e4 * s.stress * s.stress;
  b.noise_lower = 1e-10 * s.observation * s.observation;
  b.noise_upper = 1.0 * s.observation * s.observation;
  return b;
}

Hyperparameters default_initial(const CompositeDataset& data) {
  const Scales s = data_scales(CompositeOperator(data));
  Hyperparameters h;
  h.kernel_z.signal_variance = s.stress * s.stress;
  h.kernel_x = h.kernel_z;
  h.noise_variance = 1e-4 * s.observation * s.observation;
  return h;
}

FitResult fit_hyperparameters(const CompositeDataset& data,
                              const Hyperparameters& init,
                              const FitOptions& options) {
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "cannot fit hyperparameters without data");
  }
  if (options.restarts < 1) {
    throw Error(ErrorCode::kInvalidSpec, "restarts must be >= 1");
  }
  validate(init);
  const HyperBounds bounds = options.bounds.value_or(default_bounds(data));
  if (!(bounds.signal_lower > 0.0 && bounds.length_lower > 0.0 &&
        bounds.noise_lower > 0.0 && bounds.signal_upper >= bounds.signal_lower &&
        bounds.length_upper >= bounds.length_lower &&
        bounds.noise_upper >= bounds.noise_lower)) {
    throw Error(ErrorCode::kInvalidSpec, "hyperparameter bounds must be positive");
  }
  const bool shared = options.shared_hyperparameters;
  auto op = std::make_shared<const CompositeOperator>(data);
  LikelihoodEvaluator evaluator(op, shared);

  const Eigen::Index dim = shared ? 6 : 11;
  Eigen::VectorXd lo(dim);
  Eigen::VectorXd hi(dim);
  auto set_kernel_bounds = [&](Eigen::Index at) {
    lo[at] = std::log(bounds.signal_lower);
    hi[at] = std::log(bounds.signal_upper);
    for (int d = 0; d < 4; ++d) {
      lo[at + 1 + d] = std::log(bounds.length_lower);
      hi[at + 1 + d] = std::log(bounds.length_upper);
    }
  };
  set_kernel_bounds(0);
  if (!shared) set_kernel_bounds(5);
  lo[dim - 1] = std::log(bounds.noise_lower);
  hi[dim - 1] = std::log(bounds.noise_upper);

  Hyperparameters start0 = init;
  if (shared) start0.kernel_x = start0.kernel_z;
  const Eigen::VectorXd x0 = pack_log_parameters(start0, shared).cwiseMax(lo).cwiseMin(hi);

  // Seeded Halton lattice around the initial point for restarts >= 1.
  static constexpr int kPrimes[11] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31};
  auto lattice_start = [&](int r) {
    Eigen::VectorXd x(dim);
    const std::uint64_t index = static_cast<std::uint64_t>(r) + 1 + options.seed * 4099;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double u = halton(index, kPrimes[i]);
      double a;
      double b;
      const bool is_noise = i == dim - 1;
      const bool is_signal = (i == 0) || (!shared && i == 5);
      if (is_noise) {
        a = x0[i] - std::log(1e3);
        b = x0[i] + std::log(1e3);
      } else if (is_signal) {
        a = x0[i] - std::log(1e2);
        b = x0[i] + std::log(1e2);
      } else {
        a = std::log(0.2);
        b = std::log(5.0);
      }
      a = std::clamp(a, lo[i], hi[i]);
      b = std::clamp(b, lo[i], hi[i]);
      x[i] = a + u * (b - a);
    }
    return x;
  };

  Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const Hyperparameters h = unpack_log_parameters(x, shared);
    if (!grad) return evaluator.evaluate(h, false).value;
    if (options.analytic_gradient) {
      LikelihoodValue v = evaluator.evaluate(h, true);
      *grad = v.gradient;
      return v.value;
    }
    *grad = finite_difference_gradient(
        [&](const Eigen::VectorXd& y) {
          return evaluator.evaluate(unpack_log_parameters(y, shared), false).value;
        },
        x, 1e-5);
    return evaluator.evaluate(h, false).value;
  };

  BoxOptimizerOptions opt;
  opt.max_iterations = options.max_iterations;

  FitResult result;
  result.log_likelihood = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  for (int r = 0; r < options.restarts; ++r) {
    const Eigen::VectorXd start = r == 0 ? x0 : lattice_start(r);
    double value = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd x;
    try {
      const BoxOptimizerResult run = maximize_in_box(objective, start, lo, hi, opt);
      value = run.value;
      x = run.x;
      result.iterations += run.iterations;
      result.evaluations += run.evaluations;
    } catch (const Error&) {
    }
    result.restart_likelihoods.push_back(value);
    if (value > result.log_likelihood) {
      result.log_likelihood = value;
      result.best_restart = r;
      best = x;
    }
  }
  if (!std::isfinite(result.log_likelihood)) {
    throw Error(ErrorCode::kNumerical, "all hyperparameter restarts failed");
  }
  result.hyperparameters = unpack_log_parameters(best, shared);
  result.model = std::make_shared<const GpModel>(op, result.hyperparameters);
  return result;
}

Eigen::MatrixX2d base_design(const CompositeDataset& data,
                             const GridStressMap& base) {
  const int n_ch = data.channels;
  Eigen::MatrixX2d design =
      Eigen::MatrixX2d::Zero(static_cast<Eigen::Index>(data.size()) * n_ch, 2);
  for (std::size_t p = 0; p < data.size(); ++p) {
    const auto& step = data.steps[p];
    for (std::size_t m = 0; m < step.weights.size(); ++m) {
      const double w = step.weights[m];
      if (w == 0.0) continue;
      const StressValue alpha = eval_map(base, step.angles[m].x(), step.angles[m].y());
      const Eigen::MatrixX2d mix = data.mixing(p, m);
      for (int c = 0; c < n_ch; ++c) {
        design(static_cast<Eigen::Index>(p) * n_ch + c, 0) += w * mix(c, 0) * alpha.z;
        design(static_cast<Eigen::Index>(p) * n_ch + c, 1) += w * mix(c, 1) * alpha.x;
      }
    }
  }
  return design;
}

ScalingFit fit_scaling(const CompositeDataset& data, const GridStressMap& base) {
  validate(base);
  if (data.empty()) {
    throw Error(ErrorCode::kInvalidSpec, "scaling fit needs data");
  }
  const Eigen::MatrixX2d design = base_design(data, base);
  Eigen::VectorXd f(design.rows());
  for (std::size_t p = 0; p < data.size(); ++p) {
    f.segment(static_cast<Eigen::Index>(p) * data.channels, data.channels) =
        data.steps[p].observation;
  }
  const Eigen::Matrix2d gram = design.transpose() * design;
  const double det = gram.determinant();
  if (!(gram(0, 0) > 0.0 && gram(1, 1) > 0.0) ||
      !(det > 1e-12 * gram(0, 0) * gram(1, 1))) {
    throw Error(ErrorCode::kDegenerateFit,
                "base profile predictions are rank deficient; cannot fit scaling");
  }
  const Eigen::Vector2d zeta = gram.ldlt().solve(design.transpose() * f);
  return {zeta[0], zeta[1]};
}

CompositeDataset residual_dataset(const CompositeDataset& data,
                                  const GridStressMap& base,
                                  const ScalingFit& zeta) {
  const Eigen::MatrixX2d design = base_design(data, base);
  const Eigen::VectorXd predicted =
      design * Eigen::Vector2d(zeta.zeta_z, zeta.zeta_x);
  CompositeDataset out = data;
  for (std::size_t p = 0; p < out.size(); ++p) {
    out.steps[p].observation -=
        predicted.segment(static_cast<Eigen::Index>(p) * data.channels, data.channels);
  }
  return out;
}

SemiParametricModel::SemiParametricModel(GridStressMap base, ScalingFit zeta,
                                         FitResult residual)
    : base_(std::move(base)), zeta_(zeta), residual_(std::move(residual)) {}

StressPosterior SemiParametricModel::posterior_stress(const Angles& theta,
                                                      Component c) const {
  StressPosterior r = residual().posterior_stress(theta, c);
  const StressValue b = eval_map(base_, theta.x(), theta.y());
  r.mean += c == Component::kZ ? zeta_.zeta_z * b.z : zeta_.zeta_x * b.x;
  return r;
}

PosteriorGrid SemiParametricModel::residual_grid(const GridAxes& axes) const {
  return residual().posterior_stress_grid(axes);
}

PosteriorGrid SemiParametricModel::posterior_stress_grid(const GridAxes& axes) const {
  PosteriorGrid out = residual().posterior_stress_grid(axes);
  for (std::size_t i = 0; i < axes.beta.size(); ++i) {
    for (std::size_t j = 0; j < axes.gamma.size(); ++j) {
      const StressValue b = eval_map(base_, axes.beta[i], axes.gamma[j]);
      out.mean.values_z(i, j) += zeta_.zeta_z * b.z;
      out.mean.values_x(i, j) += zeta_.zeta_x * b.x;
    }
  }
  return out;
}

SemiParametricModel fit_residual(const CompositeDataset& data,
                                 const GridStressMap& base,
                                 const ScalingFit& zeta,
                                 const Hyperparameters& init,
                                 const FitOptions& options) {
  const CompositeDataset residual = residual_dataset(data, base, zeta);
  FitResult fit = fit_hyperparameters(residual, init, options);
  return SemiParametricModel(base, zeta, std::move(fit));
}

std::uint64_t dataset_digest(const CompositeDataset& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* ptr, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(ptr);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  auto mix_double = [&](double v) { mix_bytes(&v, sizeof v); };
  const int mode = static_cast<int>(data.mode);
  mix_bytes(&mode, sizeof mode);
  mix_bytes(&data.channels, sizeof data.channels);
  mix_double(data.noise_variance);
  for (const auto& step : data.steps) {
    for (const auto& a : step.angles) {
      mix_double(a.x());
      mix_double(a.y());
    }
    for (double w : step.weights) mix_double(w);
    for (const auto& m : step.mixing) {
      for (Eigen::Index k = 0; k < m.size(); ++k) mix_double(m.data()[k]);
    }
    for (Eigen::Index k = 0; k < step.observation.size(); ++k) {
      mix_double(step.observation[k]);
    }
  }
  return h;
}

}  // namespace rftgp
