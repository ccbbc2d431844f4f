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


#ifndef RFTGP_HEATMAP_HPP_
#define RFTGP_HEATMAP_HPP_

#include <string>

#include <Eigen/Core>

#include "rftgp/inverse_gp.hpp"
#include "rftgp/stress_field.hpp"

namespace rftgp {

enum class HeatmapFormat { kCsv, kSvg };

/// Hex color for t in [0, 1] on a perceptually ordered dark-to-bright ramp.
std::string heatmap_color(double t);

/// One <rect> per grid node, beta along the horizontal axis and gamma
/// increasing upward, with tick labels at the axis extents and a color bar.
std::string render_heatmap_svg(const Eigen::MatrixXd& values, const GridAxes& axes,
                               const std::string& title);

/// CSV writes both components in the stress-map format; SVG renders one.
void export_heatmap(const GridStressMap& grid, const std::string& path,
                    HeatmapFormat format, Component component = Component::kZ);

}  // namespace rftgp

#endif  // RFTGP_HEATMAP_HPP_
