#include "uniq/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "uniq/dataset.hpp"
#include "uniq/degrade.hpp"
#include "uniq/errors.hpp"

namespace uniq::synth {

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform(rng);
}

void add_gaussian_blob(GrayImage& img, double cx, double cy, double sigma, double amplitude) {
    const int r = static_cast<int>(std::ceil(4.0 * sigma));
    const int x0 = std::max(0, static_cast<int>(cx) - r);
    const int x1 = std::min(img.width - 1, static_cast<int>(cx) + r);
    const int y0 = std::max(0, static_cast<int>(cy) - r);
    const int y1 = std::min(img.height - 1, static_cast<int>(cy) + r);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx, dy = y - cy;
            img.at(x, y) += amplitude * std::exp(-(dx * dx + dy * dy) * inv);
        }
}

}  // namespace

double left_eye_x(const DatasetSpec& spec) { return 0.34375 * spec.width; }
double right_eye_x(const DatasetSpec& spec) { return 0.65625 * spec.width; }
double eye_y(const DatasetSpec& spec) { return 0.375 * spec.height; }

GrayImage average_face(const DatasetSpec& spec) {
    const int w = spec.width, h = spec.height;
    GrayImage img(w, h, 0.25);

    const double cx = 0.5 * w, cy = 0.4875 * h;
    const double rx = 0.359 * w, ry = 0.3875 * h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double ex = (x - cx) / rx, ey = (y - cy) / ry;
            const double e = ex * ex + ey * ey;
            img.at(x, y) += 0.5 / (1.0 + std::exp((e - 1.0) * 10.0));  // soft head ellipse
        }

    const double ley = eye_y(spec);
    add_gaussian_blob(img, left_eye_x(spec), ley, 4.0, -0.30);
    add_gaussian_blob(img, right_eye_x(spec), ley, 4.0, -0.30);
    // nose ridge and mouth
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double nx = x - cx, ny = y - 0.55 * h;
            img.at(x, y) += 0.08 * std::exp(-(nx * nx / 18.0 + ny * ny / 200.0));
            const double mx = x - cx, my = y - 0.7375 * h;
            img.at(x, y) -= 0.20 * std::exp(-(mx * mx / 288.0 + my * my / 18.0));
        }

    for (auto& v : img.data) v = std::clamp(v, 0.0, 1.0);
    return img;
}

GrayImage subject_image(const DatasetSpec& spec, int subject, int session_index) {
    if (subject < 0 || subject >= spec.n_subjects) throw Error("subject index out of range");
    if (session_index < 0 || session_index >= static_cast<int>(spec.sessions.size()))
        throw Error("session index out of range");

    GrayImage img = average_face(spec);
    const double cx = 0.5 * spec.width, cy = 0.4875 * spec.height;
    const double rx = 0.359 * spec.width, ry = 0.3875 * spec.height;

    // Identity: a fixed constellation of small sharp blobs inside the head.
    std::mt19937_64 rng(spec.seed * 1000003ULL + static_cast<std::uint64_t>(subject));
    for (int i = 0; i < 40; ++i) {
        double u, v;
        do {
            u = uniform_in(rng, -0.85, 0.85);
            v = uniform_in(rng, -0.85, 0.85);
        } while (u * u + v * v > 0.72);
        const double sigma = uniform_in(rng, 1.5, 3.0);
        const double magnitude = uniform_in(rng, 0.10, 0.30);
        const double amplitude = (uniform(rng) < 0.5) ? -magnitude : magnitude;
        add_gaussian_blob(img, cx + u * rx, cy + v * ry, sigma, amplitude);
    }

    // Session/capture variation: slight gain change plus sensor noise.
    const std::uint64_t session_seed =
        derive_seed(spec.seed, "synthetic/" + std::to_string(subject),
                    spec.sessions[static_cast<std::size_t>(session_index)]);
    std::mt19937_64 session_rng(session_seed);
    const double gain = uniform_in(session_rng, 0.98, 1.02);
    const auto noise = gaussian_noise_field(img.data.size(), 1e-4, session_seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = std::clamp(img.data[i] * gain + noise[i], 0.0, 1.0);
    return img;
}

std::filesystem::path write_dataset(const std::filesystem::path& dir, const DatasetSpec& spec) {
    std::filesystem::create_directories(dir);
    DatasetManifest manifest;
    char name[64];
    for (int s = 0; s < spec.n_subjects; ++s) {
        for (std::size_t sess = 0; sess < spec.sessions.size(); ++sess) {
            std::snprintf(name, sizeof(name), "subj%03d_%s.pgm", s, spec.sessions[sess].c_str());
            write_image(subject_image(spec, s, static_cast<int>(sess)), dir / name);

            ManifestEntry e;
            e.image_path = name;
            std::snprintf(name, sizeof(name), "subj%03d", s);
            e.subject_id = name;
            e.session_id = spec.sessions[sess];
            e.condition = QualityCondition::baseline();
            e.left_eye_x = left_eye_x(spec);
            e.left_eye_y = eye_y(spec);
            e.right_eye_x = right_eye_x(spec);
            e.right_eye_y = eye_y(spec);
            manifest.entries.push_back(std::move(e));
        }
    }
    const auto manifest_path = dir / "manifest.csv";
    save_manifest(manifest, manifest_path);
    return manifest_path;
}

std::filesystem::path write_probe(const std::filesystem::path& dir, const DatasetSpec& spec) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "probe.pgm";
    write_image(average_face(spec), path);
    return path;
}

}  // namespace uniq::synth
