#include "uniq/uniqueness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uniq/errors.hpp"

namespace uniq {

ImpostorScoreSet ImpostorScoreSet::make(std::string probe_id, std::vector<double> scores) {
    if (scores.size() < 2)
        throw TooFewValues("impostor score set needs >= 2 scores, got " +
                           std::to_string(scores.size()));
    for (double s : scores)
        if (!std::isfinite(s)) throw NonFiniteInput("non-finite impostor score");

    ImpostorScoreSet set;
    set.probe_id = std::move(probe_id);
    set.scores = std::move(scores);
    const auto [lo, hi] = std::minmax_element(set.scores.begin(), set.scores.end());
    set.s_min = *lo;
    set.s_max = *hi;
    set.mean = std::accumulate(set.scores.begin(), set.scores.end(), 0.0) /
               static_cast<double>(set.scores.size());
    return set;
}

IUMResult ium(const ImpostorScoreSet& set) {
    if (set.s_max == set.s_min)
        throw DegenerateScores("all impostor scores equal for probe " + set.probe_id);
    IUMResult r;
    r.probe_id = set.probe_id;
    r.n = set.scores.size();
    r.u = (set.s_max - set.mean) / (set.s_max - set.s_min);
    return r;
}

std::vector<std::string> mean_threshold_lambs(
    const std::vector<std::pair<std::string, double>>& means, double threshold) {
    std::vector<std::string> lambs;
    for (const auto& [subject, mean] : means) {
        if (!std::isfinite(mean)) throw NonFiniteInput("non-finite mean impostor score");
        if (mean > threshold) lambs.push_back(subject);
    }
    return lambs;
}

std::pair<double, double> max_impostor_statistic(const ImpostorScoreSet& set, double genuine) {
    if (!std::isfinite(genuine)) throw NonFiniteInput("non-finite genuine score");
    return {set.s_max, genuine - set.s_max};
}

}  // namespace uniq
