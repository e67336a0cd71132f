#pragma once

// Minimal polyline charts.

#include <string>
#include <vector>

namespace snr::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool log_x = false;
    int width = 640;
    int height = 420;
};

/// Renders the chart as a standalone SVG document. Non-finite points are skipped.
std::string render(const Chart& chart);

}  // namespace snr::svg
