#pragma once

#include <span>
#include <string>
#include <vector>

namespace rectikit {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal line plot: axes, tick labels, one polyline per series, legend.
// Non-finite points are skipped. Returns a standalone SVG document.
std::string line_plot_svg(const std::string& title, const std::string& xlabel,
                          const std::string& ylabel, std::span<const PlotSeries> series);

// Scatter of flat [n x 2] points; color_class (may be empty) cycles an
// 8-color palette, one class per condition id.
std::string scatter_svg(const std::string& title, std::span<const double> xy,
                        std::span<const int> color_class);

}  // namespace rectikit
