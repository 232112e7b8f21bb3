#pragma once

#include <string>
#include <vector>

namespace mcb {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // points instead of a polyline
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
};

// Plain line chart with axes, ticks and a legend. Non-finite points are
// skipped.
std::string line_chart_svg(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace mcb
