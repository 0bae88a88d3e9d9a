// Command-line front end: dataset synthesis, degradation, matching and the
// two score-stability experiments.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uniq/dataset.hpp"
#include "uniq/degrade.hpp"
#include "uniq/errors.hpp"
#include "uniq/image.hpp"
#include "uniq/matcher.hpp"
#include "uniq/pipeline.hpp"
#include "uniq/svg.hpp"
#include "uniq/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct ExperimentArgs {
    std::string config;
    std::string manifest_override;
    std::string out_override;
    std::string matcher_override;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int jobs = 1;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
    cmd->add_option("--config", args.config, "experiment config file")->required();
    cmd->add_option("--manifest", args.manifest_override, "override manifest path");
    cmd->add_option("--out", args.out_override, "override output directory");
    cmd->add_option("--matcher", args.matcher_override, "override matcher: eigen|scores:<dir>");
    cmd->add_option("--seed", args.seed_override, "override master seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
}

uniq::ExperimentConfig load_config(const ExperimentArgs& args, uniq::ExperimentKind kind) {
    auto cfg = uniq::ExperimentConfig::parse_file(args.config);
    if (cfg.experiment != kind)
        throw uniq::ConfigError("config experiment kind does not match subcommand");
    if (!args.manifest_override.empty()) cfg.manifest_path = args.manifest_override;
    if (!args.out_override.empty()) cfg.output_dir = args.out_override;
    if (args.seed_set) cfg.master_seed = args.seed_override;
    if (!args.matcher_override.empty()) {
        if (args.matcher_override == "eigen") {
            cfg.matcher = uniq::MatcherKind::Eigen;
        } else if (args.matcher_override.rfind("scores:", 0) == 0) {
            cfg.matcher = uniq::MatcherKind::ImportedScores;
            cfg.score_dir = args.matcher_override.substr(7);
        } else {
            throw uniq::ConfigError("bad --matcher value: " + args.matcher_override);
        }
    }
    cfg.validate();
    if (cfg.output_dir.empty()) throw uniq::ConfigError("no output directory configured");
    return cfg;
}

int run_degrade(const std::string& manifest_path, const std::string& condition_tag,
                std::uint64_t seed, const std::string& out_dir, const std::string& session) {
    const auto condition = uniq::QualityCondition::parse(condition_tag);
    const auto manifest = uniq::load_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    fs::create_directories(out_dir);

    uniq::DatasetManifest degraded;
    for (const auto& entry : manifest.entries) {
        if (!entry.condition.is_baseline()) continue;
        if (!session.empty() && entry.session_id != session) continue;
        uniq::GrayImage img = uniq::read_image(
            entry.image_path[0] == '/' ? fs::path(entry.image_path) : base / entry.image_path);
        img = uniq::apply_condition(
            img, condition, uniq::derive_seed(seed, entry.image_path, condition.tag()));
        const std::string name = fs::path(entry.image_path).filename().string();
        uniq::write_image(img, fs::path(out_dir) / name);

        uniq::ManifestEntry e = entry;
        e.image_path = name;
        e.condition = condition;
        degraded.entries.push_back(std::move(e));
    }
    if (degraded.entries.empty()) {
        std::cerr << "no baseline entries matched\n";
        return 1;
    }
    uniq::save_manifest(degraded, fs::path(out_dir) / "manifest.csv");
    std::cout << "wrote " << degraded.entries.size() << " degraded images to " << out_dir << "\n";
    return 0;
}

int run_match(const std::string& manifest_path, const std::string& out_file, int eigen_k) {
    const auto manifest = uniq::load_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    std::vector<uniq::AlignedFace> faces;
    uniq::ScoreMatrix m;
    for (const auto& entry : manifest.entries) {
        const uniq::GrayImage img = uniq::read_image(
            entry.image_path[0] == '/' ? fs::path(entry.image_path) : base / entry.image_path);
        faces.push_back(uniq::align(img, entry.left_eye_x, entry.left_eye_y, entry.right_eye_x,
                                    entry.right_eye_y));
        m.probe_ids.push_back(entry.image_path);
        m.gallery_ids.push_back(entry.image_path);
    }
    uniq::EigenModel model = uniq::train_eigenmodel(
        faces, eigen_k > 0 ? eigen_k : static_cast<int>(faces.size()));
    if (eigen_k <= 0) {
        const int k = uniq::pick_k_by_mass(model.eigenvalues, 0.95);
        model.basis.resize(static_cast<std::size_t>(k));
        model.eigenvalues.resize(static_cast<std::size_t>(k));
    }

    m.scores.resize(faces.size() * faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = 0; j < faces.size(); ++j)
            m.at(i, j) = uniq::similarity(model, faces[i], faces[j]);
    uniq::export_scores(m, out_file);
    std::cout << "wrote " << faces.size() << "x" << faces.size() << " score matrix to " << out_file
              << "\n";
    return 0;
}

int run_report(const std::string& stability_csv, const std::string& boxstats_csv,
               const std::string& out_dir) {
    fs::create_directories(out_dir);
    if (!stability_csv.empty()) {
        const auto points = uniq::read_stability_csv(stability_csv);
        std::ofstream out(fs::path(out_dir) / "falloff.svg", std::ios::binary);
        out << uniq::render_falloff_svg(points);
        std::cout << "wrote falloff.svg\n";
    }
    if (!boxstats_csv.empty()) {
        const auto panels = uniq::read_boxstats_csv(boxstats_csv);
        std::ofstream out(fs::path(out_dir) / "boxplot.svg", std::ios::binary);
        out << uniq::render_boxplot_svg(panels);
        std::cout << "wrote boxplot.svg\n";
    }
    if (stability_csv.empty() && boxstats_csv.empty()) {
        std::cerr << "nothing to render: pass --stability and/or --boxstats\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Impostor-score uniqueness and quality-stability toolkit"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic parametric face dataset");
    std::string synth_out;
    uniq::synth::DatasetSpec spec;
    std::vector<std::string> sessions = spec.sessions;
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--subjects", spec.n_subjects, "number of subjects");
    synth_cmd->add_option("--seed", spec.seed, "generator seed");
    synth_cmd->add_option("--sessions", sessions, "session ids");

    // degrade
    auto* degrade_cmd = app.add_subcommand("degrade", "apply one condition to a manifest subset");
    std::string d_manifest, d_condition, d_out, d_session;
    std::uint64_t d_seed = 0;
    degrade_cmd->add_option("--manifest", d_manifest)->required();
    degrade_cmd->add_option("--condition", d_condition, "e.g. blur:31 or noise:0.3")->required();
    degrade_cmd->add_option("--seed", d_seed, "master seed");
    degrade_cmd->add_option("--session", d_session, "restrict to one session");
    degrade_cmd->add_option("--out", d_out)->required();

    // match
    auto* match_cmd = app.add_subcommand("match", "produce a score-matrix file");
    std::string m_manifest, m_out;
    int m_eigen_k = 0;
    match_cmd->add_option("--manifest", m_manifest)->required();
    match_cmd->add_option("--out", m_out)->required();
    match_cmd->add_option("--eigen-k", m_eigen_k, "retained components (default: 95% mass)");

    // e1 / e2
    auto* e1_cmd = app.add_subcommand("e1", "impostor-score distribution vs gallery quality");
    ExperimentArgs e1_args;
    add_experiment_options(e1_cmd, e1_args);
    auto* e2_cmd = app.add_subcommand("e2", "cross-session IUM correlation vs probe quality");
    ExperimentArgs e2_args;
    add_experiment_options(e2_cmd, e2_args);

    // report
    auto* report_cmd = app.add_subcommand("report", "re-render charts from CSV");
    std::string r_stability, r_boxstats, r_out;
    report_cmd->add_option("--stability", r_stability, "stability.csv from an e2 run");
    report_cmd->add_option("--boxstats", r_boxstats, "boxstats.csv from an e1 run");
    report_cmd->add_option("--out", r_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            spec.sessions = sessions;
            const auto manifest = uniq::synth::write_dataset(synth_out, spec);
            const auto probe = uniq::synth::write_probe(synth_out, spec);
            std::cout << "wrote " << manifest.string() << " and " << probe.string() << "\n";
            return 0;
        }
        if (degrade_cmd->parsed())
            return run_degrade(d_manifest, d_condition, d_seed, d_out, d_session);
        if (match_cmd->parsed()) return run_match(m_manifest, m_out, m_eigen_k);
        if (e1_cmd->parsed()) {
            const auto cfg = load_config(e1_args, uniq::ExperimentKind::E1);
            const auto result = uniq::run_e1(cfg, e1_args.jobs);
            uniq::emit_report(cfg, &result, nullptr, cfg.output_dir);
            std::cout << "e1 complete: " << result.rows.size() << " conditions -> "
                      << cfg.output_dir.string() << "\n";
            return 0;
        }
        if (e2_cmd->parsed()) {
            const auto cfg = load_config(e2_args, uniq::ExperimentKind::E2);
            const auto report = uniq::run_e2(cfg, e2_args.jobs);
            uniq::emit_report(cfg, nullptr, &report, cfg.output_dir);
            std::cout << "e2 complete: baseline r = " << report.baseline_r << " over "
                      << report.subjects.size() << " subjects -> " << cfg.output_dir.string()
                      << "\n";
            return 0;
        }
        if (report_cmd->parsed()) return run_report(r_stability, r_boxstats, r_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
