#pragma once

// Minimal static SVG line charts.

#include <string>
#include <vector>

namespace pdflow {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    int width = 720;
    int height = 460;
};

/// Non-positive values are skipped on logarithmic axes.
std::string render_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace pdflow
