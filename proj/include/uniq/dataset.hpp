#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace uniq {

/// A gallery/probe quality condition. Grammar of the text tag:
///   baseline | blur:<odd int >= 3> | noise:<decimal > 0> | pose:<label>
struct QualityCondition {
    enum class Kind { Baseline, MotionBlur, GaussianNoise, Pose };

    Kind kind = Kind::Baseline;
    int blur_length = 0;
    double noise_variance = 0.0;
    std::string pose_camera;

    static QualityCondition baseline() { return {}; }
    static QualityCondition motion_blur(int length);
    static QualityCondition gaussian_noise(double variance);
    static QualityCondition pose(std::string camera);

    /// Parses a condition tag; throws ParseError on malformed input and
    /// BadLength/BadVariance when parameters violate the grammar.
    static QualityCondition parse(const std::string& tag);

    std::string tag() const;

    bool operator==(const QualityCondition& other) const;
    bool is_baseline() const { return kind == Kind::Baseline; }
};

struct ManifestEntry {
    std::string image_path;
    std::string subject_id;
    std::string session_id;
    QualityCondition condition;
    double left_eye_x = 0, left_eye_y = 0;
    double right_eye_x = 0, right_eye_y = 0;
};

/// Exact header expected on line 1 of a manifest file.
inline constexpr const char* kManifestHeader =
    "image_path,subject_id,session_id,condition_tag,lx,ly,rx,ry";

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    std::vector<std::string> subject_ids() const;  // distinct, sorted
    bool has_subject(const std::string& subject_id) const;
};

/// Loads and validates a manifest file (see kManifestHeader for the format).
DatasetManifest load_manifest(const std::filesystem::path& path);

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// One image per impostor subject; never contains the probe subject.
struct ImpostorSet {
    std::string probe_subject;
    std::vector<ManifestEntry> members;  // distinct subject_ids, sorted by subject_id
};

using PoolFilter = std::function<bool(const ManifestEntry&)>;

/// Selects one image per non-probe subject matching `filter`, the
/// lexicographically smallest image_path per subject. Throws
/// EmptyImpostorSet when fewer than 2 impostor subjects remain.
ImpostorSet build_impostor_set(const DatasetManifest& manifest,
                               const std::string& probe_subject,
                               const PoolFilter& filter);

}  // namespace uniq
