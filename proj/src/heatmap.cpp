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


#include "rftgp/heatmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rftgp/csv.hpp"
#include "rftgp/error.hpp"

namespace rftgp {
namespace {

constexpr double kPlot = 370.0;
constexpr double kLeft = 70.0;
constexpr double kTop = 40.0;
constexpr double kBarWidth = 16.0;

// Sampled from a viridis-like ramp.
constexpr std::array<std::array<double, 3>, 6> kRamp = {{
    {68, 1, 84},
    {65, 68, 135},
    {42, 120, 142},
    {34, 168, 132},
    {122, 209, 81},
    {253, 231, 37},
}};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string heatmap_color(double t) {
  if (!std::isfinite(t)) t = 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(kRamp.size() - 1);
  const auto lo = std::min<std::size_t>(static_cast<std::size_t>(pos), kRamp.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    const double v = (1.0 - frac) * kRamp[lo][c] + frac * kRamp[lo + 1][c];
    rgb[c] = static_cast<int>(std::lround(v));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string render_heatmap_svg(const Eigen::MatrixXd& values, const GridAxes& axes,
                               const std::string& title) {
  const auto nb = static_cast<Eigen::Index>(axes.beta.size());
  const auto ng = static_cast<Eigen::Index>(axes.gamma.size());
  if (nb < 1 || ng < 1 || values.rows() != nb || values.cols() != ng) {
    throw Error(ErrorCode::kDimension, "heatmap values do not match the axes");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kInvalidSpec, "heatmap values must be finite");
  }
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = hi - lo;
  const double cw = kPlot / static_cast<double>(nb);
  const double ch = kPlot / static_cast<double>(ng);
  const double width = kLeft + kPlot + 110.0;
  const double height = kTop + kPlot + 60.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0)
      << "\" height=\"" << fixed(height, 0) << "\" viewBox=\"0 0 " << fixed(width, 0)
      << ' ' << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"" << fixed(kLeft + kPlot / 2, 1) << "\" y=\"24\" text-anchor=\"middle\">"
      << escape(title) << "</text>\n";
  svg << "<g shape-rendering=\"crispEdges\">\n";
  for (Eigen::Index i = 0; i < nb; ++i) {
    for (Eigen::Index j = 0; j < ng; ++j) {
      const double t = span > 0.0 ? (values(i, j) - lo) / span : 0.5;
      const double x = kLeft + static_cast<double>(i) * cw;
      const double y = kTop + kPlot - static_cast<double>(j + 1) * ch;
      svg << "<rect x=\"" << fixed(x, 3) << "\" y=\"" << fixed(y, 3) << "\" width=\""
          << fixed(cw, 3) << "\" height=\"" << fixed(ch, 3) << "\" fill=\""
          << heatmap_color(t) << "\"/>\n";
    }
  }
  svg << "</g>\n";

  // Frame and axes.
  const double bottom = kTop + kPlot;
  const double right = kLeft + kPlot;
  svg << "<path d=\"M" << fixed(kLeft, 1) << ' ' << fixed(kTop, 1) << " V" << fixed(bottom, 1)
      << " H" << fixed(right, 1) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fixed(kLeft, 1) << "\" y=\"" << fixed(bottom + 16, 1)
      << "\" text-anchor=\"start\">" << fixed(axes.beta.front(), 3) << "</text>\n";
  svg << "<text x=\"" << fixed(right, 1) << "\" y=\"" << fixed(bottom + 16, 1)
      << "\" text-anchor=\"end\">" << fixed(axes.beta.back(), 3) << "</text>\n";
  svg << "<text x=\"" << fixed(kLeft + kPlot / 2, 1) << "\" y=\"" << fixed(bottom + 36, 1)
      << "\" text-anchor=\"middle\">β (rad)</text>\n";
  svg << "<text x=\"" << fixed(kLeft - 6, 1) << "\" y=\"" << fixed(bottom, 1)
      << "\" text-anchor=\"end\">" << fixed(axes.gamma.front(), 3) << "</text>\n";
  svg << "<text x=\"" << fixed(kLeft - 6, 1) << "\" y=\"" << fixed(kTop + 10, 1)
      << "\" text-anchor=\"end\">" << fixed(axes.gamma.back(), 3) << "</text>\n";
  svg << "<text x=\"20\" y=\"" << fixed(kTop + kPlot / 2, 1)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << fixed(kTop + kPlot / 2, 1)
      << ")\">γ (rad)</text>\n";

  // Color bar: a gradient-filled path, so the cell count stays one per node.
  const double bx = right + 24.0;
  svg << "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
  for (std::size_t k = 0; k < kRamp.size(); ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(kRamp.size() - 1);
    svg << "<stop offset=\"" << fixed(t, 3) << "\" stop-color=\"" << heatmap_color(t)
        << "\"/>\n";
  }
  svg << "</linearGradient></defs>\n";
  svg << "<path d=\"M" << fixed(bx, 1) << ' ' << fixed(kTop, 1) << " h" << fixed(kBarWidth, 1)
      << " v" << fixed(kPlot, 1) << " h-" << fixed(kBarWidth, 1)
      << " Z\" fill=\"url(#scale)\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << fixed(bx + kBarWidth + 4, 1) << "\" y=\"" << fixed(kTop + 10, 1)
      << "\">" << format_double(hi) << "</text>\n";
  svg << "<text x=\"" << fixed(bx + kBarWidth + 4, 1) << "\" y=\"" << fixed(bottom, 1)
      << "\">" << format_double(lo) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void export_heatmap(const GridStressMap& grid, const std::string& path,
                    HeatmapFormat format, Component component) {
  validate(grid);
  if (format == HeatmapFormat::kCsv) {
    write_stress_map(path, grid);
    return;
  }
  const bool z = component == Component::kZ;
  write_text_file(path, render_heatmap_svg(z ? grid.values_z : grid.values_x, grid.axes(),
                                           z ? "alpha_z (N/m^3)" : "alpha_x (N/m^3)"));
}

}  // namespace rftgp
