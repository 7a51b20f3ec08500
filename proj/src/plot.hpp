#pragma once

#include <string>
#include <vector>

namespace ewalk::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Figure {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    bool markers = false;
    std::vector<Series> series;
};

std::string render_svg(const Figure& fig);

}  // namespace ewalk::plot
