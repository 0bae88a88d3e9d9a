#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uniq {

/// Box-plot summary: hinges at the first and third quartiles, whiskers at the
/// most extreme data values within 1.5*IQR of the hinges.
struct BoxStats {
    double q1 = 0, median = 0, q3 = 0;
    double iqr = 0;
    double lower_whisker = 0, upper_whisker = 0;
    std::vector<double> outliers;  // in input order
};

/// Type-7 quantile: linear interpolation between order statistics of the
/// sorted input. `p` in [0,1], `sorted` ascending and non-empty.
double quantile_type7(std::span<const double> sorted, double p);

BoxStats boxplot_stats(std::span<const double> values);

/// Sample Pearson correlation coefficient; requires equal lengths >= 3 and
/// nonzero variance in both arguments.
double pearson(std::span<const double> x, std::span<const double> y);

/// Divides every correlation by the baseline one, so the baseline condition
/// maps to exactly 1.0.
std::vector<std::pair<std::string, double>> normalized_falloff(
    const std::vector<std::pair<std::string, double>>& correlations,
    const std::string& baseline_condition);

}  // namespace uniq
