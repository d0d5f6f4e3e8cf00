#pragma once
#include <string>
#include <utility>
#include <vector>

namespace brw {

struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> pts;
    std::string color;  // default colors assigned if empty
};

// static line chart with axes, ticks, point markers and a legend
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<SvgSeries>& series);

} // namespace brw
