#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "uniq/dataset.hpp"
#include "uniq/errors.hpp"
#include "uniq/image.hpp"
#include "uniq/matcher.hpp"
#include "uniq/pipeline.hpp"
#include "uniq/synth.hpp"

using namespace uniq;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

synth::DatasetSpec small_spec(int subjects) {
    synth::DatasetSpec spec;
    spec.n_subjects = subjects;
    spec.seed = 7;
    return spec;
}

ExperimentConfig e2_config(const std::filesystem::path& manifest) {
    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = e2\n"
        "manifest = " + manifest.string() + "\n"
        "blur_lengths = 5,17,31\n"
        "noise_variances = 0.3\n"
        "master_seed = 42\n"
        "reference_session = s1\n"
        "varied_session = s2\n");
    return cfg;
}

}  // namespace

TEST_CASE("parallel_for covers every index once and propagates errors") {
    std::vector<std::atomic<int>> hits(500);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);

    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37) throw ZeroBaseline("boom");
                                 }),
                    ZeroBaseline);
}

TEST_CASE("config parsing") {
    const auto cfg = ExperimentConfig::parse_text(
        "# comment\n"
        "experiment = e2\n"
        "manifest = data/m.csv\n"
        "conditions = pose:05_0\n"
        "blur_lengths = 5, 31\n"
        "noise_variances = 0.03\n"
        "master_seed = 99\n"
        "matcher = eigen\n"
        "eigen_k = auto95\n"
        "reference_session = s3\n"
        "varied_session = s4\n"
        "output_dir = out\n",
        "/base");
    CHECK(cfg.experiment == ExperimentKind::E2);
    CHECK(cfg.manifest_path == "/base/data/m.csv");
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.eigen_k == 0);
    REQUIRE(cfg.conditions.size() == 5);
    CHECK(cfg.conditions[0].is_baseline());  // auto-prepended anchor
    CHECK(cfg.conditions[1].tag() == "pose:05_0");
    CHECK(cfg.conditions[2].tag() == "blur:5");
    CHECK(cfg.conditions[3].tag() == "blur:31");
    CHECK(cfg.conditions[4].tag() == "noise:0.03");
}

TEST_CASE("config validation errors") {
    CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = e2\n"
                                                 "manifest = m.csv\n"
                                                 "conditions = \n"
                                                 "reference_session = a\n"
                                                 "varied_session = b\n"),
                    ConfigError);  // empty condition list
    CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = e2\n"
                                                 "manifest = m.csv\n"
                                                 "conditions = baseline\n"
                                                 "reference_session = a\n"
                                                 "varied_session = a\n"),
                    ConfigError);  // aliased sessions
    CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = e1\n"
                                                 "manifest = m.csv\n"
                                                 "conditions = baseline\n"),
                    ConfigError);  // e1 without probe
    CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = e2\n"
                                                 "manifest = m.csv\n"
                                                 "conditions = baseline\n"
                                                 "mystery_key = 1\n"
                                                 "reference_session = a\n"
                                                 "varied_session = b\n"),
                    ConfigError);  // unknown key
    CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = e3\n"), ConfigError);
}

TEST_CASE("e2 with aliased session content has r = 1 at baseline") {
    testutil::TempDir tmp;
    const auto spec = small_spec(10);
    synth::write_dataset(tmp.path() / "d", spec);

    // both sessions point at identical pixel content: copy s1 images as s2
    DatasetManifest manifest = load_manifest(tmp.path() / "d" / "manifest.csv");
    DatasetManifest aliased;
    for (const auto& e : manifest.entries) {
        if (e.session_id != "s1") continue;
        aliased.entries.push_back(e);
        ManifestEntry twin = e;
        twin.image_path = "twin_" + e.image_path;
        twin.session_id = "s2";
        std::filesystem::copy_file(tmp.path() / "d" / e.image_path,
                                   tmp.path() / "d" / twin.image_path);
        aliased.entries.push_back(std::move(twin));
    }
    save_manifest(aliased, tmp.path() / "d" / "aliased.csv");

    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = e2\n"
        "manifest = " + (tmp.path() / "d" / "aliased.csv").string() + "\n"
        "conditions = baseline\n"
        "master_seed = 1\n"
        "reference_session = s1\n"
        "varied_session = s2\n");
    const auto report = run_e2(cfg, 1);
    CHECK(report.baseline_r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.falloff.front().second == 1.0);
}

TEST_CASE("e2 rejects subjects present in only one session") {
    testutil::TempDir tmp;
    synth::write_dataset(tmp.path() / "d", small_spec(6));
    DatasetManifest manifest = load_manifest(tmp.path() / "d" / "manifest.csv");
    // drop subj000's s2 image
    DatasetManifest broken;
    for (const auto& e : manifest.entries)
        if (!(e.subject_id == "subj000" && e.session_id == "s2")) broken.entries.push_back(e);
    save_manifest(broken, tmp.path() / "d" / "broken.csv");

    const auto cfg = e2_config(tmp.path() / "d" / "broken.csv");
    CHECK_THROWS_AS(run_e2(cfg, 1), SubjectNotInBothSessions);
}

TEST_CASE("e2 correlation falls off with degradation severity") {
    testutil::TempDir tmp;
    const auto manifest = synth::write_dataset(tmp.path() / "d", small_spec(40));
    const auto cfg = e2_config(manifest);
    const auto report = run_e2(cfg, 2);

    REQUIRE(report.conditions.size() == 5);  // baseline, blur 5/17/31, noise 0.3
    const double baseline = report.baseline_r;
    double blur31 = 0, noise03 = 0;
    std::vector<double> blur_rs;
    for (const auto& c : report.conditions) {
        CHECK(c.r >= -1.0);
        CHECK(c.r <= 1.0);
        if (c.condition.kind == QualityCondition::Kind::MotionBlur) blur_rs.push_back(c.r);
        if (c.condition.tag() == "blur:31") blur31 = c.r;
        if (c.condition.kind == QualityCondition::Kind::GaussianNoise) noise03 = c.r;
    }

    CHECK(baseline > blur31);
    CHECK(baseline > noise03);
    CHECK(blur31 < 0.7 * baseline);

    // non-increasing over blur length, allowing one adjacent inversion
    int inversions = 0;
    double prev = baseline;
    for (double r : blur_rs) {
        if (r > prev + 1e-9) ++inversions;
        prev = r;
    }
    CHECK(inversions <= 1);
}

TEST_CASE("pose conditions select labeled images and missing labels error out") {
    testutil::TempDir tmp;
    const auto spec = small_spec(8);
    synth::write_dataset(tmp.path() / "d", spec);
    DatasetManifest manifest = load_manifest(tmp.path() / "d" / "manifest.csv");

    // fabricate a pose variant for every s2 image: the mirrored capture
    DatasetManifest with_pose = manifest;
    for (const auto& e : manifest.entries) {
        if (e.session_id != "s2") continue;
        GrayImage img = read_image(tmp.path() / "d" / e.image_path);
        GrayImage flipped(img.width, img.height);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) flipped.at(x, y) = img.at(img.width - 1 - x, y);
        ManifestEntry p = e;
        p.image_path = "pose_" + e.image_path;
        p.condition = QualityCondition::pose("19_1");
        write_image(flipped, tmp.path() / "d" / p.image_path);
        with_pose.entries.push_back(std::move(p));
    }
    save_manifest(with_pose, tmp.path() / "d" / "pose.csv");

    ExperimentConfig cfg = ExperimentConfig::parse_text(
        "experiment = e2\n"
        "manifest = " + (tmp.path() / "d" / "pose.csv").string() + "\n"
        "conditions = baseline, pose:19_1\n"
        "master_seed = 3\n"
        "reference_session = s1\n"
        "varied_session = s2\n");
    const auto report = run_e2(cfg, 1);
    REQUIRE(report.conditions.size() == 2);
    CHECK(report.conditions[1].r < report.baseline_r);  // off-pose probes decorrelate

    cfg.conditions.push_back(QualityCondition::pose("08_1"));  // not in manifest
    CHECK_THROWS_AS(run_e2(cfg, 1), MissingPoseImages);
}

TEST_CASE("e1 produces one box row per condition and reacts to heavy noise") {
    testutil::TempDir tmp;
    const auto spec = small_spec(30);
    const auto manifest = synth::write_dataset(tmp.path() / "d", spec);
    const auto probe = synth::write_probe(tmp.path() / "d", spec);

    std::ostringstream text;
    text << "experiment = e1\n"
         << "manifest = " << manifest.string() << "\n"
         << "probe_image = " << probe.string() << "\n"
         << "probe_left_eye = " << synth::left_eye_x(spec) << "," << synth::eye_y(spec) << "\n"
         << "probe_right_eye = " << synth::right_eye_x(spec) << "," << synth::eye_y(spec) << "\n"
         << "noise_variances = 0.3\n"
         << "master_seed = 5\n";
    const auto cfg = ExperimentConfig::parse_text(text.str());
    const auto result = run_e1(cfg, 2);

    REQUIRE(result.rows.size() == 2);
    const auto& baseline = result.rows[0];
    const auto& noisy = result.rows[1];
    CHECK(baseline.condition.is_baseline());
    CHECK(baseline.n == 30);
    CHECK(noisy.n == 30);
    // the distribution visibly shifts under heavy noise
    CHECK(std::abs(noisy.mean - baseline.mean) > baseline.stats.iqr / 10.0);
}

TEST_CASE("imported score matrices drive e2 without images") {
    testutil::TempDir tmp;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> val(-1, 1);

    ScoreMatrix reference;
    for (int p = 0; p < 8; ++p) reference.probe_ids.push_back("s" + std::to_string(p));
    for (int g = 0; g < 20; ++g) reference.gallery_ids.push_back("g" + std::to_string(g));
    reference.scores.resize(reference.probe_ids.size() * reference.gallery_ids.size());
    for (auto& s : reference.scores) s = val(rng);
    export_scores(reference, tmp.path() / "reference.csv");
    export_scores(reference, tmp.path() / "baseline.csv");  // identical scores at baseline

    ScoreMatrix shuffled = reference;
    for (auto& s : shuffled.scores) s = val(rng);
    export_scores(shuffled, tmp.path() / "blur-31.csv");

    const auto cfg = ExperimentConfig::parse_text(
        "experiment = e2\n"
        "manifest = unused.csv\n"
        "blur_lengths = 31\n"
        "matcher = scores:" + tmp.path().string() + "\n"
        "reference_session = a\n"
        "varied_session = b\n");
    const auto report = run_e2(cfg, 1);
    CHECK(report.baseline_r == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(report.conditions.size() == 2);
    CHECK(report.conditions[1].r < 1.0);

    // a probe missing from a condition file is a protocol violation
    ScoreMatrix missing = reference;
    missing.probe_ids.erase(missing.probe_ids.begin());
    missing.scores.erase(missing.scores.begin(),
                         missing.scores.begin() + static_cast<long>(missing.gallery_ids.size()));
    export_scores(missing, tmp.path() / "blur-31.csv");
    CHECK_THROWS_AS(run_e2(cfg, 1), SubjectNotInBothSessions);
}

TEST_CASE("reports are byte-deterministic and shaped by condition count") {
    testutil::TempDir tmp;
    const auto manifest = synth::write_dataset(tmp.path() / "d", small_spec(12));
    ExperimentConfig cfg = e2_config(manifest);
    cfg.output_dir = tmp.path() / "out";
    const auto report = run_e2(cfg, 1);

    emit_report(cfg, nullptr, &report, tmp.path() / "out1");
    emit_report(cfg, nullptr, &report, tmp.path() / "out2");
    for (const char* name : {"stability.csv", "falloff.svg", "run_meta.txt"})
        CHECK(read_file(tmp.path() / "out1" / name) == read_file(tmp.path() / "out2" / name));

    // header + one row per condition (4 conditions here plus baseline)
    const std::string csv = read_file(tmp.path() / "out1" / "stability.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5);

    const auto points = read_stability_csv(tmp.path() / "out1" / "stability.csv");
    REQUIRE(points.size() == report.conditions.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(points[i].condition == report.conditions[i].condition.tag());
        CHECK(points[i].r == report.conditions[i].r);
    }
}

TEST_CASE("identical runs with different worker counts emit identical bytes") {
    testutil::TempDir tmp;
    const auto manifest = synth::write_dataset(tmp.path() / "d", small_spec(12));
    ExperimentConfig cfg = e2_config(manifest);

    const auto serial = run_e2(cfg, 1);
    const auto threaded = run_e2(cfg, 4);
    emit_report(cfg, nullptr, &serial, tmp.path() / "serial");
    emit_report(cfg, nullptr, &threaded, tmp.path() / "threaded");
    CHECK(read_file(tmp.path() / "serial" / "stability.csv") ==
          read_file(tmp.path() / "threaded" / "stability.csv"));
}

TEST_CASE("published Table-1 shaped replay anchors the fall-off chart at 1.0") {
    // correlations as published for the FaceVACS blur row
    StabilityReport report;
    const std::vector<std::pair<std::string, double>> published = {
        {"baseline", 0.68}, {"blur:5", 0.65}, {"blur:9", 0.59}, {"blur:17", 0.27},
        {"blur:31", 0.13}};
    for (const auto& [tag, r] : published) {
        StabilityReport::ConditionResult c;
        c.condition = QualityCondition::parse(tag);
        c.r = r;
        report.conditions.push_back(std::move(c));
    }
    report.baseline_r = 0.68;
    report.falloff = normalized_falloff(published, "baseline");

    testutil::TempDir tmp;
    const auto cfg = ExperimentConfig::parse_text(
        "experiment = e2\nmanifest = m.csv\nconditions = baseline\n"
        "reference_session = a\nvaried_session = b\n");
    emit_report(cfg, nullptr, &report, tmp.path());
    const std::string svg = read_file(tmp.path() / "falloff.svg");
    CHECK(svg.find("data-condition=\"baseline\" data-r=\"0.68") != std::string::npos);
    CHECK(svg.find("data-normalized=\"1\"") != std::string::npos);
}

TEST_CASE("boxstats csv round-trips for re-rendering") {
    testutil::TempDir tmp;
    const auto spec = small_spec(12);
    const auto manifest = synth::write_dataset(tmp.path() / "d", spec);
    const auto probe = synth::write_probe(tmp.path() / "d", spec);
    std::ostringstream text;
    text << "experiment = e1\n"
         << "manifest = " << manifest.string() << "\n"
         << "probe_image = " << probe.string() << "\n"
         << "probe_left_eye = " << synth::left_eye_x(spec) << "," << synth::eye_y(spec) << "\n"
         << "probe_right_eye = " << synth::right_eye_x(spec) << "," << synth::eye_y(spec) << "\n"
         << "blur_lengths = 5\n"
         << "master_seed = 5\n";
    const auto cfg = ExperimentConfig::parse_text(text.str());
    const auto result = run_e1(cfg, 1);
    emit_report(cfg, &result, nullptr, tmp.path() / "out");

    const auto panels = read_boxstats_csv(tmp.path() / "out" / "boxstats.csv");
    REQUIRE(panels.size() == result.rows.size());
    for (std::size_t i = 0; i < panels.size(); ++i) {
        CHECK(panels[i].condition == result.rows[i].condition.tag());
        CHECK(panels[i].stats.median == result.rows[i].stats.median);
        CHECK(panels[i].stats.outliers == result.rows[i].stats.outliers);
    }
    // and the boxplot can be re-rendered from the CSV alone
    CHECK(render_boxplot_svg(panels) ==
          read_file(tmp.path() / "out" / "boxplot.svg"));
}
