#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace popcast::cli {

struct ChartLine {
    std::string label;
    std::string color;
    std::vector<int> years;
    std::vector<double> values;
};

/// Fixed color per model registration index; the actual series is drawn in black.
std::string model_color(std::size_t registration_index);

/// 800x480 line chart, year on x and persons on y, with one polyline and
/// markers per line and a legend in line order. Deterministic output.
/// Throws std::invalid_argument for a line whose years and values differ in
/// length or when no line has points.
std::string render_svg_chart(std::string_view title, const std::vector<ChartLine>& lines);

}  // namespace popcast::cli
