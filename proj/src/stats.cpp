#include "uniq/stats.hpp"

#include <algorithm>
#include <cmath>

#include "uniq/errors.hpp"

namespace uniq {

double quantile_type7(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats boxplot_stats(std::span<const double> values) {
    if (values.size() < 2)
        throw TooFewValues("boxplot_stats needs at least 2 values, got " +
                           std::to_string(values.size()));
    for (double v : values)
        if (!std::isfinite(v)) throw NonFiniteInput("non-finite value in boxplot input");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxStats s;
    s.q1 = quantile_type7(sorted, 0.25);
    s.median = quantile_type7(sorted, 0.50);
    s.q3 = quantile_type7(sorted, 0.75);
    s.iqr = s.q3 - s.q1;

    const double lo_fence = s.q1 - 1.5 * s.iqr;
    const double hi_fence = s.q3 + 1.5 * s.iqr;

    // Whiskers are attained data values; at least the values in [q1,q3]
    // are inside the fences, so both bounds exist.
    s.lower_whisker = *std::find_if(sorted.begin(), sorted.end(),
                                    [&](double v) { return v >= lo_fence; });
    s.upper_whisker = *std::find_if(sorted.rbegin(), sorted.rend(),
                                    [&](double v) { return v <= hi_fence; });

    for (double v : values)
        if (v < s.lower_whisker || v > s.upper_whisker) s.outliers.push_back(v);
    return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw LengthMismatch("pearson: length " + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()));
    if (x.size() < 3) throw TooFewValues("pearson needs at least 3 points");
    const std::size_t n = x.size();

    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw NonFiniteInput("non-finite value in pearson input");
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("pearson argument has zero variance");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<std::pair<std::string, double>> normalized_falloff(
    const std::vector<std::pair<std::string, double>>& correlations,
    const std::string& baseline_condition) {
    double baseline_r = 0.0;
    bool found = false;
    for (const auto& [cond, r] : correlations) {
        if (cond == baseline_condition) {
            baseline_r = r;
            found = true;
            break;
        }
    }
    if (!found) throw MissingBaseline("baseline condition '" + baseline_condition + "' absent");
    if (baseline_r == 0.0) throw ZeroBaseline("baseline correlation is zero");

    std::vector<std::pair<std::string, double>> out;
    out.reserve(correlations.size());
    for (const auto& [cond, r] : correlations)
        out.emplace_back(cond, cond == baseline_condition ? 1.0 : r / baseline_r);
    return out;
}

}  // namespace uniq
