#include "uniq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "uniq/degrade.hpp"
#include "uniq/errors.hpp"
#include "uniq/image.hpp"
#include "uniq/matcher.hpp"
#include "uniq/uniqueness.hpp"

namespace uniq {

namespace {

constexpr const char* kBaselineTag = "baseline";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::pair<double, double> parse_point(const std::string& s, const std::string& key) {
    const auto items = split_list(s);
    if (items.size() != 2) throw ConfigError(key + " must be 'x,y', got '" + s + "'");
    return {std::stod(items[0]), std::stod(items[1])};
}

/// Condition tags are filesystem-unfriendly (':'); imported score files use
/// '-' instead, e.g. blur-31.csv.
std::string tag_to_filename(const std::string& tag) {
    std::string out = tag;
    std::replace(out.begin(), out.end(), ':', '-');
    return out + ".csv";
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
    return p.is_absolute() ? p : base / p;
}

/// One entry per subject matching the filter, lexicographically smallest
/// image_path, keyed and ordered by subject_id. Same selection rule as
/// build_impostor_set.
std::map<std::string, const ManifestEntry*> select_one_per_subject(
    const DatasetManifest& manifest, const PoolFilter& filter) {
    std::map<std::string, const ManifestEntry*> best;
    for (const auto& e : manifest.entries) {
        if (filter && !filter(e)) continue;
        auto [it, inserted] = best.try_emplace(e.subject_id, &e);
        if (!inserted && e.image_path < it->second->image_path) it->second = &e;
    }
    return best;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-12 || nb < 1e-12)
        throw ZeroProjection("projected coefficient vector has near-zero norm");
    return dot / (na * nb);
}

EigenModel train_model_for(const ExperimentConfig& cfg, const std::vector<AlignedFace>& faces) {
    // Train with a generous cap first when k is automatic, then refit the
    // retained count from the eigenvalue mass.
    if (cfg.eigen_k > 0) return train_eigenmodel(faces, cfg.eigen_k);
    EigenModel full = train_eigenmodel(faces, static_cast<int>(faces.size()));
    const int k = pick_k_by_mass(full.eigenvalues, 0.95);
    full.basis.resize(static_cast<std::size_t>(k));
    full.eigenvalues.resize(static_cast<std::size_t>(k));
    return full;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path.string());
    out << content;
    if (!out) throw IOError("short write: " + path.string());
}

}  // namespace

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> threads;
    const int n_threads = static_cast<int>(std::min<std::size_t>(count, jobs));
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open config: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), path.parent_path());
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text,
                                              const std::filesystem::path& base_dir) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (!kv.emplace(key, value).second)
            throw ConfigError("duplicate config key: " + key);
    }

    static const std::set<std::string> known = {
        "experiment",    "manifest",        "probe_image",       "probe_left_eye",
        "probe_right_eye", "conditions",    "blur_lengths",      "noise_variances",
        "master_seed",   "matcher",         "eigen_k",           "reference_session",
        "varied_session", "output_dir"};
    for (const auto& [key, value] : kv)
        if (!known.count(key)) throw ConfigError("unknown config key: " + key);

    auto get = [&kv](const std::string& key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    ExperimentConfig cfg;
    if (const auto* v = get("experiment")) {
        if (*v == "e1")
            cfg.experiment = ExperimentKind::E1;
        else if (*v == "e2")
            cfg.experiment = ExperimentKind::E2;
        else
            throw ConfigError("experiment must be e1 or e2, got '" + *v + "'");
    }
    if (const auto* v = get("manifest")) cfg.manifest_path = resolve(base_dir, *v);
    if (const auto* v = get("probe_image")) cfg.probe_image = resolve(base_dir, *v);
    if (const auto* v = get("probe_left_eye"))
        std::tie(cfg.probe_left_eye_x, cfg.probe_left_eye_y) = parse_point(*v, "probe_left_eye");
    if (const auto* v = get("probe_right_eye"))
        std::tie(cfg.probe_right_eye_x, cfg.probe_right_eye_y) = parse_point(*v, "probe_right_eye");
    if (const auto* v = get("master_seed")) {
        std::uint64_t seed = 0;
        auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), seed);
        if (ec != std::errc() || p != v->data() + v->size())
            throw ConfigError("bad master_seed: '" + *v + "'");
        cfg.master_seed = seed;
    }
    if (const auto* v = get("matcher")) {
        if (*v == "eigen") {
            cfg.matcher = MatcherKind::Eigen;
        } else if (v->rfind("scores:", 0) == 0) {
            cfg.matcher = MatcherKind::ImportedScores;
            cfg.score_dir = resolve(base_dir, v->substr(7));
        } else {
            throw ConfigError("matcher must be 'eigen' or 'scores:<dir>', got '" + *v + "'");
        }
    }
    if (const auto* v = get("eigen_k")) {
        if (*v == "auto95") {
            cfg.eigen_k = 0;
        } else {
            cfg.eigen_k = std::stoi(*v);
            if (cfg.eigen_k < 1) throw ConfigError("eigen_k must be >= 1 or auto95");
        }
    }
    if (const auto* v = get("reference_session")) cfg.reference_session = *v;
    if (const auto* v = get("varied_session")) cfg.varied_session = *v;
    if (const auto* v = get("output_dir")) cfg.output_dir = resolve(base_dir, *v);

    // Condition list: explicit tags first, then blur lengths, then noise
    // variances, deduplicated; baseline is prepended when missing.
    std::vector<QualityCondition> conditions;
    auto push = [&conditions](QualityCondition c) {
        for (const auto& existing : conditions)
            if (existing == c) return;
        conditions.push_back(std::move(c));
    };
    if (const auto* v = get("conditions"))
        for (const auto& tag : split_list(*v)) push(QualityCondition::parse(tag));
    if (const auto* v = get("blur_lengths"))
        for (const auto& item : split_list(*v)) push(QualityCondition::motion_blur(std::stoi(item)));
    if (const auto* v = get("noise_variances"))
        for (const auto& item : split_list(*v))
            push(QualityCondition::gaussian_noise(std::stod(item)));
    if (conditions.empty()) throw ConfigError("no conditions configured");
    const bool has_baseline = std::any_of(conditions.begin(), conditions.end(),
                                          [](const auto& c) { return c.is_baseline(); });
    if (!has_baseline) conditions.insert(conditions.begin(), QualityCondition::baseline());
    else
        std::stable_partition(conditions.begin(), conditions.end(),
                              [](const auto& c) { return c.is_baseline(); });
    cfg.conditions = std::move(conditions);

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (manifest_path.empty()) throw ConfigError("manifest is required");
    if (conditions.empty() || !conditions.front().is_baseline())
        throw ConfigError("conditions must be non-empty with baseline first");
    if (experiment == ExperimentKind::E1) {
        if (matcher == MatcherKind::Eigen) {
            if (probe_image.empty()) throw ConfigError("e1 requires probe_image");
            if (probe_left_eye_x == 0 && probe_left_eye_y == 0 && probe_right_eye_x == 0 &&
                probe_right_eye_y == 0)
                throw ConfigError("e1 requires probe_left_eye and probe_right_eye");
        }
    } else {
        if (reference_session.empty() || varied_session.empty())
            throw ConfigError("e2 requires reference_session and varied_session");
        if (reference_session == varied_session)
            throw ConfigError("reference_session and varied_session must differ");
    }
    if (matcher == MatcherKind::ImportedScores && score_dir.empty())
        throw ConfigError("imported-score matcher requires a score directory");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("toolkit_version", kToolkitVersion);
    out.emplace_back("experiment", experiment == ExperimentKind::E1 ? "e1" : "e2");
    out.emplace_back("manifest", manifest_path.string());
    if (experiment == ExperimentKind::E1 && !probe_image.empty()) {
        out.emplace_back("probe_image", probe_image.string());
        out.emplace_back("probe_left_eye", fmt17(probe_left_eye_x) + "," + fmt17(probe_left_eye_y));
        out.emplace_back("probe_right_eye",
                         fmt17(probe_right_eye_x) + "," + fmt17(probe_right_eye_y));
    }
    std::string tags;
    for (const auto& c : conditions) {
        if (!tags.empty()) tags += ",";
        tags += c.tag();
    }
    out.emplace_back("conditions", tags);
    out.emplace_back("master_seed", std::to_string(master_seed));
    out.emplace_back("matcher", matcher == MatcherKind::Eigen
                                    ? "eigen"
                                    : "scores:" + score_dir.string());
    out.emplace_back("eigen_k", eigen_k == 0 ? "auto95" : std::to_string(eigen_k));
    if (experiment == ExperimentKind::E2) {
        out.emplace_back("reference_session", reference_session);
        out.emplace_back("varied_session", varied_session);
    }
    if (!output_dir.empty()) out.emplace_back("output_dir", output_dir.string());
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// Shared pipeline helpers
// ---------------------------------------------------------------------------

struct LoadedEntry {
    const ManifestEntry* entry = nullptr;
    AlignedFace face;
};

AlignedFace load_and_align(const std::filesystem::path& base, const ManifestEntry& entry) {
    const GrayImage img = read_image(resolve(base, entry.image_path));
    return align(img, entry.left_eye_x, entry.left_eye_y, entry.right_eye_x, entry.right_eye_y);
}

AlignedFace load_degrade_align(const std::filesystem::path& base, const ManifestEntry& entry,
                               const QualityCondition& condition, std::uint64_t master_seed) {
    GrayImage img = read_image(resolve(base, entry.image_path));
    // Degradation precedes geometric alignment (capture-realistic order).
    img = apply_condition(img, condition,
                          derive_seed(master_seed, entry.image_path, condition.tag()));
    return align(img, entry.left_eye_x, entry.left_eye_y, entry.right_eye_x, entry.right_eye_y);
}

std::vector<FalloffPoint> falloff_points(const StabilityReport& report) {
    std::vector<FalloffPoint> points;
    for (const auto& c : report.conditions) {
        FalloffPoint p;
        p.condition = c.condition.tag();
        p.r = c.r;
        for (const auto& [tag, norm] : report.falloff)
            if (tag == p.condition) p.normalized = norm;
        points.push_back(std::move(p));
    }
    return points;
}

// ---------------------------------------------------------------------------
// Imported score-matrix paths
// ---------------------------------------------------------------------------

std::vector<double> impostor_row(const ScoreMatrix& m, std::size_t probe_row,
                                 const std::string& probe_subject) {
    std::vector<double> scores;
    scores.reserve(m.gallery_ids.size());
    for (std::size_t g = 0; g < m.gallery_ids.size(); ++g) {
        if (m.gallery_ids[g] == probe_subject) continue;  // never score against self
        scores.push_back(m.at(probe_row, g));
    }
    return scores;
}

E1Result run_e1_imported(const ExperimentConfig& cfg) {
    E1Result result;
    for (const auto& condition : cfg.conditions) {
        const auto path = cfg.score_dir / tag_to_filename(condition.tag());
        const ScoreMatrix m = import_scores(path);
        if (m.probe_ids.size() != 1)
            throw ShapeMismatch("e1 imported matrix must have exactly 1 probe row: " +
                                path.string());
        std::vector<double> scores(m.scores);
        BoxRow row;
        row.condition = condition;
        row.n = scores.size();
        row.mean = 0;
        for (double s : scores) row.mean += s;
        row.mean /= static_cast<double>(scores.size());
        row.stats = boxplot_stats(scores);
        result.rows.push_back(std::move(row));
    }
    return result;
}

StabilityReport run_e2_imported(const ExperimentConfig& cfg) {
    const ScoreMatrix reference = import_scores(cfg.score_dir / "reference.csv");

    StabilityReport report;
    report.subjects = reference.probe_ids;

    report.reference_ium.reserve(report.subjects.size());
    for (std::size_t p = 0; p < report.subjects.size(); ++p) {
        const auto set = ImpostorScoreSet::make(report.subjects[p],
                                                impostor_row(reference, p, report.subjects[p]));
        report.reference_ium.push_back(ium(set).u);
    }

    std::vector<std::pair<std::string, double>> correlations;
    for (const auto& condition : cfg.conditions) {
        const auto path = cfg.score_dir / tag_to_filename(condition.tag());
        const ScoreMatrix varied = import_scores(path);

        StabilityReport::ConditionResult cr;
        cr.condition = condition;
        cr.varied_ium.reserve(report.subjects.size());
        for (const auto& subject : report.subjects) {
            const auto it = std::find(varied.probe_ids.begin(), varied.probe_ids.end(), subject);
            if (it == varied.probe_ids.end())
                throw SubjectNotInBothSessions("subject " + subject + " missing from " +
                                               path.string());
            const auto row = static_cast<std::size_t>(it - varied.probe_ids.begin());
            const auto set = ImpostorScoreSet::make(subject, impostor_row(varied, row, subject));
            cr.varied_ium.push_back(ium(set).u);
        }
        cr.r = pearson(report.reference_ium, cr.varied_ium);
        correlations.emplace_back(condition.tag(), cr.r);
        if (condition.is_baseline()) report.baseline_r = cr.r;
        report.conditions.push_back(std::move(cr));
    }
    report.falloff = normalized_falloff(correlations, kBaselineTag);
    return report;
}

}  // namespace

// ---------------------------------------------------------------------------
// Experiment 1
// ---------------------------------------------------------------------------

E1Result run_e1(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    if (cfg.experiment != ExperimentKind::E1) throw ConfigError("config is not an e1 experiment");
    if (cfg.matcher == MatcherKind::ImportedScores) return run_e1_imported(cfg);

    const DatasetManifest manifest = load_manifest(cfg.manifest_path);
    const std::filesystem::path base = cfg.manifest_path.parent_path();

    // Gallery: one baseline image per subject.
    const auto gallery = select_one_per_subject(
        manifest, [](const ManifestEntry& e) { return e.condition.is_baseline(); });
    if (gallery.size() < 2) throw EmptyImpostorSet("gallery has fewer than 2 subjects");

    std::vector<const ManifestEntry*> gallery_entries;
    gallery_entries.reserve(gallery.size());
    for (const auto& [subject, entry] : gallery) gallery_entries.push_back(entry);

    std::vector<AlignedFace> gallery_faces(gallery_entries.size());
    parallel_for(gallery_entries.size(), jobs, [&](std::size_t i) {
        gallery_faces[i] = load_and_align(base, *gallery_entries[i]);
    });

    const EigenModel model = train_model_for(cfg, gallery_faces);

    const GrayImage probe_img = read_image(cfg.probe_image);
    const AlignedFace probe = align(probe_img, cfg.probe_left_eye_x, cfg.probe_left_eye_y,
                                    cfg.probe_right_eye_x, cfg.probe_right_eye_y);
    const std::vector<double> probe_coeffs = project(model, probe);

    E1Result result;
    for (const auto& condition : cfg.conditions) {
        // Pose is a selection: pick per-subject images carrying that label.
        std::vector<const ManifestEntry*> entries;
        if (condition.kind == QualityCondition::Kind::Pose) {
            const auto selected = select_one_per_subject(
                manifest, [&](const ManifestEntry& e) { return e.condition == condition; });
            for (const auto& [subject, entry] : selected) entries.push_back(entry);
            if (entries.empty())
                throw MissingPoseImages("no manifest images for condition " + condition.tag());
        } else {
            entries = gallery_entries;
        }
        if (entries.size() < 2)
            throw EmptyImpostorSet("condition " + condition.tag() + " leaves < 2 gallery subjects");

        std::vector<double> scores(entries.size());
        parallel_for(entries.size(), jobs, [&](std::size_t i) {
            const AlignedFace face =
                load_degrade_align(base, *entries[i], condition, cfg.master_seed);
            scores[i] = cosine(probe_coeffs, project(model, face));
        });

        BoxRow row;
        row.condition = condition;
        row.n = scores.size();
        for (double s : scores) row.mean += s;
        row.mean /= static_cast<double>(scores.size());
        row.stats = boxplot_stats(scores);
        result.rows.push_back(std::move(row));
    }
    return result;
}

// ---------------------------------------------------------------------------
// Experiment 2
// ---------------------------------------------------------------------------

StabilityReport run_e2(const ExperimentConfig& cfg, int jobs) {
    cfg.validate();
    if (cfg.experiment != ExperimentKind::E2) throw ConfigError("config is not an e2 experiment");
    if (cfg.matcher == MatcherKind::ImportedScores) return run_e2_imported(cfg);

    const DatasetManifest manifest = load_manifest(cfg.manifest_path);
    const std::filesystem::path base = cfg.manifest_path.parent_path();

    // Every subject seen in either named session must be in both.
    const auto in_reference = select_one_per_subject(manifest, [&](const ManifestEntry& e) {
        return e.condition.is_baseline() && e.session_id == cfg.reference_session;
    });
    const auto in_varied = select_one_per_subject(manifest, [&](const ManifestEntry& e) {
        return e.condition.is_baseline() && e.session_id == cfg.varied_session;
    });
    for (const auto& [subject, entry] : in_reference)
        if (!in_varied.count(subject))
            throw SubjectNotInBothSessions("subject " + subject + " only in session " +
                                           cfg.reference_session);
    for (const auto& [subject, entry] : in_varied)
        if (!in_reference.count(subject))
            throw SubjectNotInBothSessions("subject " + subject + " only in session " +
                                           cfg.varied_session);

    std::vector<std::string> subjects;
    subjects.reserve(in_varied.size());
    for (const auto& [subject, entry] : in_varied) subjects.push_back(subject);

    // Impostor pool: baseline-quality images outside the varied session
    // (reference session plus any imported impostor sessions). The pool is
    // never degraded.
    const PoolFilter pool_filter = [&cfg](const ManifestEntry& e) {
        return e.condition.is_baseline() && e.session_id != cfg.varied_session;
    };
    const auto pool = select_one_per_subject(manifest, pool_filter);
    if (pool.size() < 3) throw EmptyImpostorSet("impostor pool needs at least 3 subjects");

    std::vector<const ManifestEntry*> pool_entries;
    pool_entries.reserve(pool.size());
    for (const auto& [subject, entry] : pool) pool_entries.push_back(entry);

    std::vector<std::uint64_t> pool_checksums(pool_entries.size());
    std::vector<AlignedFace> pool_faces(pool_entries.size());
    parallel_for(pool_entries.size(), jobs, [&](std::size_t i) {
        const GrayImage img = read_image(resolve(base, pool_entries[i]->image_path));
        pool_checksums[i] = image_checksum(img);
        pool_faces[i] = align(img, pool_entries[i]->left_eye_x, pool_entries[i]->left_eye_y,
                              pool_entries[i]->right_eye_x, pool_entries[i]->right_eye_y);
    });

    const EigenModel model = train_model_for(cfg, pool_faces);

    std::vector<std::vector<double>> pool_coeffs(pool_faces.size());
    parallel_for(pool_faces.size(), jobs,
                 [&](std::size_t i) { pool_coeffs[i] = project(model, pool_faces[i]); });

    // Per-subject work item: reference IUM plus one varied IUM per condition.
    const std::size_t n_subjects = subjects.size();
    const std::size_t n_conditions = cfg.conditions.size();
    std::vector<double> reference_ium(n_subjects);
    std::vector<std::vector<double>> varied_ium(n_conditions,
                                                std::vector<double>(n_subjects));

    parallel_for(n_subjects, jobs, [&](std::size_t si) {
        const std::string& subject = subjects[si];

        auto score_probe = [&](const AlignedFace& probe_face) {
            const std::vector<double> probe_coeffs = project(model, probe_face);
            std::vector<double> scores;
            scores.reserve(pool_entries.size());
            for (std::size_t pi = 0; pi < pool_entries.size(); ++pi) {
                if (pool_entries[pi]->subject_id == subject) continue;
                scores.push_back(cosine(probe_coeffs, pool_coeffs[pi]));
            }
            if (scores.size() < 2)
                throw EmptyImpostorSet("fewer than 2 impostors for subject " + subject);
            return ium(ImpostorScoreSet::make(subject, std::move(scores))).u;
        };

        const ManifestEntry& ref_entry = *in_reference.at(subject);
        reference_ium[si] = score_probe(load_and_align(base, ref_entry));

        const ManifestEntry& var_entry = *in_varied.at(subject);
        for (std::size_t ci = 0; ci < n_conditions; ++ci) {
            const QualityCondition& condition = cfg.conditions[ci];
            const ManifestEntry* probe_entry = &var_entry;
            if (condition.kind == QualityCondition::Kind::Pose) {
                const auto pose_selected = select_one_per_subject(
                    manifest, [&](const ManifestEntry& e) {
                        return e.condition == condition && e.session_id == cfg.varied_session &&
                               e.subject_id == subject;
                    });
                if (pose_selected.empty())
                    throw MissingPoseImages("subject " + subject + " has no " + condition.tag() +
                                            " image in session " + cfg.varied_session);
                probe_entry = pose_selected.begin()->second;
            }
            varied_ium[ci][si] =
                score_probe(load_degrade_align(base, *probe_entry, condition, cfg.master_seed));
        }
    });

    // The impostor pool must come out of the run untouched.
    parallel_for(pool_entries.size(), jobs, [&](std::size_t i) {
        const GrayImage img = read_image(resolve(base, pool_entries[i]->image_path));
        if (image_checksum(img) != pool_checksums[i])
            throw Error("impostor pool image modified during run: " +
                        pool_entries[i]->image_path);
    });

    StabilityReport report;
    report.subjects = std::move(subjects);
    report.reference_ium = std::move(reference_ium);
    std::vector<std::pair<std::string, double>> correlations;
    for (std::size_t ci = 0; ci < n_conditions; ++ci) {
        StabilityReport::ConditionResult cr;
        cr.condition = cfg.conditions[ci];
        cr.varied_ium = std::move(varied_ium[ci]);
        cr.r = pearson(report.reference_ium, cr.varied_ium);
        correlations.emplace_back(cr.condition.tag(), cr.r);
        if (cr.condition.is_baseline()) report.baseline_r = cr.r;
        report.conditions.push_back(std::move(cr));
    }
    report.falloff = normalized_falloff(correlations, kBaselineTag);
    return report;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

void emit_report(const ExperimentConfig& cfg, const E1Result* e1, const StabilityReport* e2,
                 const std::filesystem::path& output_dir) {
    std::filesystem::create_directories(output_dir);

    {
        std::ostringstream meta;
        for (const auto& [key, value] : cfg.echo()) meta << key << " = " << value << "\n";
        write_file(output_dir / "run_meta.txt", meta.str());
    }

    if (e2) {
        std::ostringstream csv;
        csv << "condition,r,normalized\n";
        for (const auto& c : e2->conditions) {
            double normalized = 0;
            for (const auto& [tag, norm] : e2->falloff)
                if (tag == c.condition.tag()) normalized = norm;
            csv << c.condition.tag() << ',' << fmt17(c.r) << ',' << fmt17(normalized) << '\n';
        }
        write_file(output_dir / "stability.csv", csv.str());
        write_file(output_dir / "falloff.svg", render_falloff_svg(falloff_points(*e2)));
    }

    if (e1) {
        std::ostringstream csv;
        csv << "condition,n,mean,q1,median,q3,iqr,lower_whisker,upper_whisker,outliers\n";
        std::vector<BoxPanel> panels;
        for (const auto& row : e1->rows) {
            csv << row.condition.tag() << ',' << row.n << ',' << fmt17(row.mean) << ','
                << fmt17(row.stats.q1) << ',' << fmt17(row.stats.median) << ','
                << fmt17(row.stats.q3) << ',' << fmt17(row.stats.iqr) << ','
                << fmt17(row.stats.lower_whisker) << ',' << fmt17(row.stats.upper_whisker) << ',';
            for (std::size_t i = 0; i < row.stats.outliers.size(); ++i) {
                if (i) csv << ';';
                csv << fmt17(row.stats.outliers[i]);
            }
            csv << '\n';
            panels.push_back({row.condition.tag(), row.stats});
        }
        write_file(output_dir / "boxstats.csv", csv.str());
        write_file(output_dir / "boxplot.svg", render_boxplot_svg(panels));
    }
}

std::vector<FalloffPoint> read_stability_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || trim(line) != "condition,r,normalized")
        throw ParseError("bad stability.csv header in " + path.string());
    std::vector<FalloffPoint> points;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split_list(line);
        if (fields.size() != 3) throw ParseError("bad stability.csv row: " + line);
        points.push_back({fields[0], std::stod(fields[1]), std::stod(fields[2])});
    }
    if (points.empty()) throw ParseError("stability.csv has no rows: " + path.string());
    return points;
}

std::vector<BoxPanel> read_boxstats_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        trim(line) != "condition,n,mean,q1,median,q3,iqr,lower_whisker,upper_whisker,outliers")
        throw ParseError("bad boxstats.csv header in " + path.string());
    std::vector<BoxPanel> panels;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::istringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(trim(field));
        if (line.back() == ',') fields.emplace_back();
        if (fields.size() != 10) throw ParseError("bad boxstats.csv row: " + line);
        BoxPanel panel;
        panel.condition = fields[0];
        panel.stats.q1 = std::stod(fields[3]);
        panel.stats.median = std::stod(fields[4]);
        panel.stats.q3 = std::stod(fields[5]);
        panel.stats.iqr = std::stod(fields[6]);
        panel.stats.lower_whisker = std::stod(fields[7]);
        panel.stats.upper_whisker = std::stod(fields[8]);
        if (!fields[9].empty()) {
            std::istringstream outs(fields[9]);
            std::string o;
            while (std::getline(outs, o, ';')) panel.stats.outliers.push_back(std::stod(o));
        }
        panels.push_back(std::move(panel));
    }
    if (panels.empty()) throw ParseError("boxstats.csv has no rows: " + path.string());
    return panels;
}

}  // namespace uniq
