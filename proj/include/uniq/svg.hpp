#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uniq/stats.hpp"

namespace uniq {

/// Per-condition entry of the correlation fall-off chart.
struct FalloffPoint {
    std::string condition;
    double r = 0;           // raw Pearson correlation
    double normalized = 0;  // r / r_baseline
};

/// Line chart of normalized IUM correlation per condition. Each data point
/// carries data-condition / data-r / data-normalized attributes so values can
/// be parsed back out of the file.
std::string render_falloff_svg(const std::vector<FalloffPoint>& points);

struct BoxPanel {
    std::string condition;
    BoxStats stats;
};

/// One box glyph per condition, annotated with data-* attributes
/// (q1, median, q3, whiskers) and outlier circles.
std::string render_boxplot_svg(const std::vector<BoxPanel>& panels);

}  // namespace uniq
