#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uniq/dataset.hpp"
#include "uniq/stats.hpp"
#include "uniq/svg.hpp"

namespace uniq {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ExperimentKind { E1, E2 };
enum class MatcherKind { Eigen, ImportedScores };

/// Parsed experiment configuration. File format: one `key = value` per line,
/// '#' starts a comment. Relative paths are resolved against the config
/// file's directory.
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::E2;
    std::filesystem::path manifest_path;

    // E1 probe asset (the fixed-identity query image).
    std::filesystem::path probe_image;
    double probe_left_eye_x = 0, probe_left_eye_y = 0;
    double probe_right_eye_x = 0, probe_right_eye_y = 0;

    std::vector<QualityCondition> conditions;  // baseline first
    std::uint64_t master_seed = 0;

    MatcherKind matcher = MatcherKind::Eigen;
    std::filesystem::path score_dir;  // ImportedScores only
    int eigen_k = 0;                  // 0 = smallest k capturing 95% eigenvalue mass

    std::string reference_session;  // E2
    std::string varied_session;     // E2

    std::filesystem::path output_dir;

    static ExperimentConfig parse_file(const std::filesystem::path& path);
    static ExperimentConfig parse_text(const std::string& text,
                                       const std::filesystem::path& base_dir = ".");
    void validate() const;

    /// Ordered key/value echo for the run-metadata file.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

struct BoxRow {
    QualityCondition condition;
    std::size_t n = 0;
    double mean = 0;
    BoxStats stats;
};

struct E1Result {
    std::vector<BoxRow> rows;  // one per condition, config order
};

struct StabilityReport {
    std::vector<std::string> subjects;    // common subjects, sorted
    std::vector<double> reference_ium;    // aligned with subjects

    struct ConditionResult {
        QualityCondition condition;
        std::vector<double> varied_ium;
        double r = 0;
    };
    std::vector<ConditionResult> conditions;  // config order, baseline first

    double baseline_r = 0;
    std::vector<std::pair<std::string, double>> falloff;  // condition tag -> r/r_baseline
};

/// Experiment 1: fixed probe identity, per-condition impostor score
/// distribution of the gallery.
E1Result run_e1(const ExperimentConfig& config, int jobs = 1);

/// Experiment 2: cross-session IUM correlation under probe-quality variation;
/// the impostor pool stays at baseline quality throughout.
StabilityReport run_e2(const ExperimentConfig& config, int jobs = 1);

/// Writes stability.csv + falloff.svg (E2), boxstats.csv + boxplot.svg (E1)
/// and run_meta.txt. Byte-deterministic for identical inputs.
void emit_report(const ExperimentConfig& config, const E1Result* e1, const StabilityReport* e2,
                 const std::filesystem::path& output_dir);

// CSV readers used by `report` to re-render charts from earlier runs.
std::vector<FalloffPoint> read_stability_csv(const std::filesystem::path& path);
std::vector<BoxPanel> read_boxstats_csv(const std::filesystem::path& path);

/// Runs fn(0..count-1) on `jobs` threads. Results must be written to
/// pre-indexed slots; the first exception is rethrown after joining.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace uniq
