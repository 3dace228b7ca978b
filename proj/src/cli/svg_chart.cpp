#include "popcast/cli/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace popcast::cli {

namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 90;
constexpr double kRight = 600;  // legend sits to the right of the plot area
constexpr double kTop = 50;
constexpr double kBottom = 420;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
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

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` intervals.
double nice_step(double range, int target, int& decimals) {
    const double raw = range / target;
    const double exponent = std::floor(std::log10(raw));
    const double base = std::pow(10.0, exponent);
    const double fraction = raw / base;
    const double nice = fraction <= 1 ? 1 : fraction <= 2 ? 2 : fraction <= 5 ? 5 : 10;
    decimals = std::max(0, -static_cast<int>(exponent));
    return nice * base;
}

std::string tick_label(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

}  // namespace

std::string model_color(std::size_t registration_index) {
    static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    return kPalette[registration_index % std::size(kPalette)];
}

std::string render_svg_chart(std::string_view title, const std::vector<ChartLine>& lines) {
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -y_min;
    int x_min = std::numeric_limits<int>::max();
    int x_max = std::numeric_limits<int>::min();
    for (const auto& line : lines) {
        if (line.years.size() != line.values.size()) {
            throw std::invalid_argument("chart: line '" + line.label + "' has mismatched years and values");
        }
        for (std::size_t i = 0; i < line.years.size(); ++i) {
            if (!std::isfinite(line.values[i])) {
                throw std::invalid_argument("chart: line '" + line.label + "' has a non-finite value");
            }
            x_min = std::min(x_min, line.years[i]);
            x_max = std::max(x_max, line.years[i]);
            y_min = std::min(y_min, line.values[i]);
            y_max = std::max(y_max, line.values[i]);
        }
    }
    if (x_min > x_max) throw std::invalid_argument("chart: nothing to plot");

    double x_lo = x_min;
    double x_hi = x_max;
    if (x_lo == x_hi) x_lo -= 0.5, x_hi += 0.5;
    const double pad = y_max > y_min ? 0.05 * (y_max - y_min) : std::max(1.0, 0.05 * std::abs(y_max));
    double y_lo = y_min - pad;
    double y_hi = y_max + pad;
    int decimals = 0;
    const double step = nice_step(y_hi - y_lo, 5, decimals);
    y_lo = std::floor(y_lo / step) * step;
    y_hi = std::ceil(y_hi / step) * step;

    auto px = [&](double year) { return kLeft + (year - x_lo) / (x_hi - x_lo) * (kRight - kLeft); };
    auto py = [&](double v) { return kBottom - (v - y_lo) / (y_hi - y_lo) * (kBottom - kTop); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"480\" viewBox=\"0 0 800 480\" "
           "font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
           escape(title) + "</text>\n";

    // Grid and y ticks.
    const int y_ticks = static_cast<int>(std::lround((y_hi - y_lo) / step));
    for (int k = 0; k <= y_ticks; ++k) {
        const double v = y_lo + k * step;
        const std::string y = num(py(v));
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + y + "\" x2=\"" + num(kRight) + "\" y2=\"" + y +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
               tick_label(v, decimals) + "</text>\n";
    }
    const int year_step = std::max(1, (x_max - x_min + 11) / 12);
    for (int year = x_min; year <= x_max; year += year_step) {
        const std::string x = num(px(year));
        svg += "<line x1=\"" + x + "\" y1=\"" + num(kBottom) + "\" x2=\"" + x + "\" y2=\"" + num(kBottom + 5) +
               "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + num(kBottom + 20) + "\" text-anchor=\"middle\">" +
               std::to_string(year) + "</text>\n";
    }
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(kRight - kLeft) +
           "\" height=\"" + num(kBottom - kTop) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kHeight - 18) +
           "\" text-anchor=\"middle\">Year</text>\n";
    svg += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((kTop + kBottom) / 2) + ")\">Population (persons)</text>\n";

    for (const auto& line : lines) {
        if (line.years.empty()) continue;
        std::string points;
        for (std::size_t i = 0; i < line.years.size(); ++i) {
            points += (i ? " " : "") + num(px(line.years[i])) + "," + num(py(line.values[i]));
        }
        svg += "<polyline fill=\"none\" stroke=\"" + line.color + "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
        for (std::size_t i = 0; i < line.years.size(); ++i) {
            svg += "<circle cx=\"" + num(px(line.years[i])) + "\" cy=\"" + num(py(line.values[i])) +
                   "\" r=\"3\" fill=\"" + line.color + "\"/>\n";
        }
    }

    double legend_y = kTop + 10;
    for (const auto& line : lines) {
        const std::string y = num(legend_y);
        svg += "<line x1=\"" + num(kRight + 12) + "\" y1=\"" + y + "\" x2=\"" + num(kRight + 36) + "\" y2=\"" + y +
               "\" stroke=\"" + line.color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + num(kRight + 42) + "\" y=\"" + y + "\" dominant-baseline=\"middle\">" +
               escape(line.label) + "</text>\n";
        legend_y += 22;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace popcast::cli
