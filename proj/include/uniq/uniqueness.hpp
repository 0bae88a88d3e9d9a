#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uniq {

/// One probe's impostor similarity scores with cached extremes.
struct ImpostorScoreSet {
    std::string probe_id;
    std::vector<double> scores;
    double s_min = 0, s_max = 0, mean = 0;

    /// Builds a set with cached statistics; requires >= 2 finite scores.
    static ImpostorScoreSet make(std::string probe_id, std::vector<double> scores);
};

struct IUMResult {
    std::string probe_id;
    double u = 0;        // in [0,1]
    std::size_t n = 0;   // impostor count
};

/// Impostor-based uniqueness: (s_max - mean) / (s_max - s_min).
/// Throws DegenerateScores when all scores are equal (division by zero).
IUMResult ium(const ImpostorScoreSet& set);

/// Subjects whose mean impostor score is strictly above the threshold,
/// in input order.
std::vector<std::string> mean_threshold_lambs(
    const std::vector<std::pair<std::string, double>>& means, double threshold);

/// Doddington lamb indicator: the maximum impostor score and the margin
/// genuine - max_impostor. A small (or negative) margin flags a lamb.
std::pair<double, double> max_impostor_statistic(const ImpostorScoreSet& set, double genuine);

}  // namespace uniq
