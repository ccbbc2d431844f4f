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

#include "rftgp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"

namespace rftgp {
namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Vector2d rotate(double angle, const Eigen::Vector2d& v) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kInvalidSpec, message);
}

// Positions along a polyline at evenly spaced arc lengths.
std::vector<Eigen::Vector2d> sample_polyline(
    const std::vector<Eigen::Vector2d>& vertices, int count,
    std::vector<double>* arc_lengths) {
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    cumulative.push_back(cumulative.back() +
                         (vertices[i] - vertices[i - 1]).norm());
  }
  const double total = cumulative.back();
  std::vector<Eigen::Vector2d> out;
  out.reserve(count);
  std::size_t leg = 1;
  for (int k = 0; k < count; ++k) {
    const double s = total * k / (count - 1);
    while (leg + 1 < vertices.size() && s > cumulative[leg]) ++leg;
    const double leg_length = cumulative[leg] - cumulative[leg - 1];
    const double u =
        leg_length > 0.0 ? (s - cumulative[leg - 1]) / leg_length : 0.0;
    out.push_back((1.0 - u) * vertices[leg - 1] + u * vertices[leg]);
    arc_lengths->push_back(s);
  }
  out.back() = vertices.back();
  return out;
}

// Gauss-Legendre (5 point) arc length of the spline over [a, b].
double spline_arc_length(const NaturalCubicSpline& spline, double a,
                         double b) {
  static constexpr double kNodes[5] = {0.0, -0.5384693101056831,
                                       0.5384693101056831, -0.9061798459386640,
                                       0.9061798459386640};
  static constexpr double kWeights[5] = {
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
      0.2369268850561891, 0.2369268850561891};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double dz = spline.derivative(mid + half * kNodes[i]);
    sum += kWeights[i] * std::sqrt(1.0 + dz * dz);
  }
  return half * sum;
}

PoseSequence rectangle_poses(const TrajectorySpec& spec) {
  const auto& g = spec.rectangle;
  require(g.penetration >= 0.0 && g.shear >= 0.0 && g.extraction >= 0.0,
          "rectangle gait lengths must be non-negative");
  require(g.penetration + g.shear + g.extraction > 0.0,
          "rectangle gait has zero length");
  std::vector<Eigen::Vector2d> vertices = {
      {0.0, 0.0},
      {0.0, -g.penetration},
      {g.shear, -g.penetration},
      {g.shear, -g.penetration + g.extraction}};
  std::vector<double> arc;
  auto points = sample_polyline(vertices, spec.sample_count, &arc);
  PoseSequence poses;
  for (std::size_t k = 0; k < points.size(); ++k) {
    poses.push_back({points[k] + spec.offset, 0.0, arc[k] / spec.speed});
  }
  return poses;
}

PoseSequence spline_poses(const TrajectorySpec& spec) {
  const auto& knots = spec.spline.control_points;
  require(knots.size() >= 2, "cubic spline needs at least 2 control points");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    require(knots[i].x() > knots[i - 1].x(),
            "spline control points must have strictly increasing x");
  }
  const std::size_t pieces = knots.size() - 1;
  require(static_cast<std::size_t>(spec.sample_count) >= pieces + 1,
          "cubic spline needs at least one sample per control point");
  NaturalCubicSpline spline(knots);

  // Tabulated cumulative arc length per piece, used for inversion.
  constexpr int kTable = 2048;
  std::vector<std::vector<double>> tables(pieces);
  std::vector<double> lengths(pieces);
  for (std::size_t p = 0; p < pieces; ++p) {
    const double a = knots[p].x();
    const double b = knots[p + 1].x();
    auto& table = tables[p];
    table.assign(kTable + 1, 0.0);
    for (int j = 0; j < kTable; ++j) {
      const double x0 = a + (b - a) * j / kTable;
      const double x1 = a + (b - a) * (j + 1) / kTable;
      table[j + 1] = table[j] + spline_arc_length(spline, x0, x1);
    }
    lengths[p] = table.back();
  }

  // Sample intervals per piece proportional to arc length (largest
  // remainder), at least one each, so every control point is a sample.
  const int intervals = spec.sample_count - 1;
  double total = 0.0;
  for (double l : lengths) total += l;
  std::vector<int> counts(pieces, 1);
  int assigned = static_cast<int>(pieces);
  std::vector<double> remainders(pieces);
  for (std::size_t p = 0; p < pieces; ++p) {
    const double ideal = intervals * lengths[p] / total;
    const int extra = std::max(0, static_cast<int>(std::floor(ideal)) - 1);
    counts[p] += extra;
    assigned += extra;
    remainders[p] = ideal - counts[p];
  }
  while (assigned < intervals) {
    auto it = std::max_element(remainders.begin(), remainders.end());
    const auto p = static_cast<std::size_t>(it - remainders.begin());
    counts[p] += 1;
    remainders[p] -= 1.0;
    ++assigned;
  }
  while (assigned > intervals) {
    std::size_t p = pieces;
    for (std::size_t q = 0; q < pieces; ++q) {
      if (counts[q] > 1 && (p == pieces || remainders[q] < remainders[p])) p = q;
    }
    counts[p] -= 1;
    remainders[p] += 1.0;
    --assigned;
  }

  PoseSequence poses;
  double arc_before = 0.0;
  for (std::size_t p = 0; p < pieces; ++p) {
    const double a = knots[p].x();
    const double b = knots[p + 1].x();
    const auto& table = tables[p];
    const int first = (p == 0) ? 0 : 1;
    for (int k = first; k <= counts[p]; ++k) {
      double x;
      double s;
      if (k == 0) {
        x = a;
        s = 0.0;
      } else if (k == counts[p]) {
        x = b;
        s = lengths[p];
      } else {
        s = lengths[p] * k / counts[p];
        auto it = std::upper_bound(table.begin(), table.end(), s);
        const int j = std::clamp(static_cast<int>(it - table.begin()) - 1, 0,
                                 kTable - 1);
        const double x0 = a + (b - a) * j / kTable;
        const double dx = (b - a) / kTable;
        const double seg = table[j + 1] - table[j];
        x = x0 + dx * (s - table[j]) / seg;
        // Newton polish against the local quadrature.
        for (int it_n = 0; it_n < 3; ++it_n) {
          const double err = table[j] + spline_arc_length(spline, x0, x) - s;
          const double dz = spline.derivative(x);
          x -= err / std::sqrt(1.0 + dz * dz);
        }
      }
      const Eigen::Vector2d position =
          (k == 0 || k == counts[p]) ? Eigen::Vector2d(knots[p + (k ? 1 : 0)])
                                     : Eigen::Vector2d(x, spline.value(x));
      poses.push_back(
          {position + spec.offset, 0.0, (arc_before + s) / spec.speed});
    }
    arc_before += lengths[p];
  }
  return poses;
}

PoseSequence rotation_poses(const TrajectorySpec& spec) {
  const auto& g = spec.rotation;
  require(g.angular_range >= 0.0 && std::isfinite(g.angular_range),
          "rotation angular range must be finite and non-negative");
  require(g.direction == 1 || g.direction == -1,
          "rotation direction must be +1 or -1");
  const double radius = g.center.norm();
  const int n = spec.sample_count;
  const double path = radius * g.angular_range;
  // Zero-length rotations keep a unit time step so timestamps still increase.
  const double dt = path > 0.0 ? path / (n - 1) / spec.speed : 1.0;
  PoseSequence poses;
  for (int k = 0; k < n; ++k) {
    const double angle = g.direction * g.angular_range * k / (n - 1);
    const Eigen::Vector2d position = g.center + rotate(angle, -g.center);
    poses.push_back({position + spec.offset, angle, dt * k});
  }
  return poses;
}

}  // namespace

double Toe::total_area() const {
  double sum = 0.0;
  for (const auto& s : segments) sum += s.area;
  return sum;
}

Toe make_toe(const ToeSpec& spec) {
  require(spec.size > 0.0 && std::isfinite(spec.size),
          "toe length/radius must be positive");
  require(spec.width > 0.0 && std::isfinite(spec.width),
          "toe width must be positive");
  require(spec.segment_count >= 1, "toe needs at least one segment");
  require(std::isfinite(spec.attitude), "toe attitude must be finite");

  Toe toe;
  toe.spec = spec;
  const int m = spec.segment_count;
  if (spec.kind == ToeKind::kIToe) {
    const double piece = spec.size / m;
    for (int k = 0; k < m; ++k) {
      ToeSegment seg;
      seg.center = {-0.5 * spec.size + (k + 0.5) * piece, 0.0};
      seg.tangent_angle = 0.0;
      seg.area = piece * spec.width;
      toe.segments.push_back(seg);
    }
  } else {
    const double r = spec.size;
    const double dphi = kPi / m;
    for (int k = 0; k < m; ++k) {
      // Arc angle measured from +x; the lower half spans (pi, 2pi).
      const double phi = kPi + (k + 0.5) * dphi;
      ToeSegment seg;
      seg.center = {r * std::cos(phi), r + r * std::sin(phi)};
      seg.tangent_angle = phi + 0.5 * kPi;
      seg.area = r * dphi * spec.width;
      seg.outward_normal = {std::cos(phi), std::sin(phi)};
      toe.segments.push_back(seg);
    }
  }
  return toe;
}

PoseSequence make_trajectory(const TrajectorySpec& spec) {
  require(spec.sample_count >= 2, "trajectory needs at least 2 samples");
  require(spec.speed > 0.0 && std::isfinite(spec.speed),
          "trajectory speed must be positive");
  switch (spec.kind) {
    case TrajectoryKind::kRectangle:
      return rectangle_poses(spec);
    case TrajectoryKind::kCubicSpline:
      return spline_poses(spec);
    case TrajectoryKind::kRotation:
      return rotation_poses(spec);
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown trajectory kind");
}

NaturalCubicSpline::NaturalCubicSpline(
    const std::vector<Eigen::Vector2d>& knots) {
  const std::size_t n = knots.size();
  for (const auto& k : knots) {
    xs_.push_back(k.x());
    zs_.push_back(k.y());
  }
  second_.assign(n, 0.0);
  if (n < 3) return;
  // Tridiagonal solve for interior second derivatives (Thomas algorithm).
  std::vector<double> diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = xs_[i] - xs_[i - 1];
    const double h1 = xs_[i + 1] - xs_[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((zs_[i + 1] - zs_[i]) / h1 - (zs_[i] - zs_[i - 1]) / h0);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double lower = xs_[i] - xs_[i - 1];
    const double factor = lower / diag[i - 1];
    diag[i] -= factor * upper[i - 1];
    rhs[i] -= factor * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    second_[i] = (rhs[i] - upper[i] * second_[i + 1]) / diag[i];
  }
}

std::size_t NaturalCubicSpline::piece(double x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const auto idx = static_cast<std::ptrdiff_t>(it - xs_.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(xs_.size()) - 2));
}

double NaturalCubicSpline::value(double x) const {
  const std::size_t i = piece(x);
  const double h = xs_[i + 1] - xs_[i];
  const double a = (xs_[i + 1] - x) / h;
  const double b = (x - xs_[i]) / h;
  return a * zs_[i] + b * zs_[i + 1] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) *
             h * h / 6.0;
}

double NaturalCubicSpline::derivative(double x) const {
  const std::size_t i = piece(x);
  const double h = xs_[i + 1] - xs_[i];
  const double a = (xs_[i + 1] - x) / h;
  const double b = (x - xs_[i]) / h;
  return (zs_[i + 1] - zs_[i]) / h +
         ((1.0 - 3.0 * a * a) * second_[i] + (3.0 * b * b - 1.0) * second_[i + 1]) *
             h / 6.0;
}

double normalize_beta(double beta) {
  constexpr double kHalf = 0.5 * kPi;
  if (beta >= -kHalf && beta < kHalf) return beta;
  double r = std::fmod(beta + kHalf, kPi);
  if (r < 0.0) r += kPi;
  r -= kHalf;
  if (r >= kHalf) r -= kPi;
  if (r < -kHalf) r = -kHalf;
  return r;
}

SegmentStateSeries segment_states(const Toe& toe, const PoseSequence& poses,
                                  double surface_height) {
  SegmentStateSeries series;
  series.steps = static_cast<int>(poses.size());
  series.segments = static_cast<int>(toe.segments.size());
  series.states.resize(static_cast<std::size_t>(series.steps) *
                       series.segments);
  const int n = series.steps;
  const int m_count = series.segments;

  std::vector<Eigen::Vector2d> world(static_cast<std::size_t>(n) * m_count);
  for (int i = 0; i < n; ++i) {
    const double psi = toe.spec.attitude + poses[i].orientation;
    series.timestamps.push_back(poses[i].time);
    series.reference_positions.push_back(poses[i].position);
    for (int m = 0; m < m_count; ++m) {
      world[static_cast<std::size_t>(i) * m_count + m] =
          poses[i].position + rotate(psi, toe.segments[m].center);
    }
  }

  for (int i = 0; i < n; ++i) {
    const int lo = (i == 0) ? 0 : i - 1;
    const int hi = (i == n - 1) ? n - 1 : i + 1;
    const double dt = poses[hi].time - poses[lo].time;
    const double psi = toe.spec.attitude + poses[i].orientation;
    for (int m = 0; m < m_count; ++m) {
      const auto& seg = toe.segments[m];
      const Eigen::Vector2d& p = world[static_cast<std::size_t>(i) * m_count + m];
      Eigen::Vector2d v = Eigen::Vector2d::Zero();
      if (n > 1 && dt > 0.0) {
        v = (world[static_cast<std::size_t>(hi) * m_count + m] -
             world[static_cast<std::size_t>(lo) * m_count + m]) /
            dt;
      }
      SegmentState& s = series.at(i, m);
      s.beta = normalize_beta(psi + seg.tangent_angle);
      s.area = seg.area;
      s.depth = std::max(0.0, surface_height - p.y());
      s.submerged = s.depth > 0.0;
      if (!s.submerged) s.depth = 0.0;
      s.moving = v.norm() >= kMinSpeed;
      if (s.moving) {
        const Eigen::Vector2d tangent(std::cos(s.beta), std::sin(s.beta));
        const Eigen::Vector2d normal(-std::sin(s.beta), std::cos(s.beta));
        s.gamma = std::atan2(v.dot(tangent), std::abs(v.dot(normal)));
        if (seg.outward_normal.isZero()) {
          s.leading = true;
        } else {
          s.leading = v.dot(rotate(psi, seg.outward_normal)) > 0.0;
        }
      } else {
        s.gamma = 0.0;
        s.leading = false;
      }
    }
  }
  return series;
}

std::string segment_states_csv(const SegmentStateSeries& series) {
  std::string out = "step,segment,beta,gamma,depth_m,area_m2,submerged\n";
  for (int i = 0; i < series.steps; ++i) {
    for (int m = 0; m < series.segments; ++m) {
      const auto& s = series.at(i, m);
      out += std::to_string(i) + ',' + std::to_string(m) + ',' +
             format_double(s.beta) + ',' + format_double(s.gamma) + ',' +
             format_double(s.depth) + ',' + format_double(s.area) + ',' +
             (s.submerged ? "1" : "0") + '\n';
    }
  }
  return out;
}

}  // namespace rftgp
