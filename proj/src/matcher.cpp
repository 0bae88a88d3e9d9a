#include "uniq/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "uniq/errors.hpp"

namespace uniq {

AlignedFace align(const GrayImage& img, double left_eye_x, double left_eye_y,
                  double right_eye_x, double right_eye_y) {
    if (!img.in_bounds(left_eye_x, left_eye_y) || !img.in_bounds(right_eye_x, right_eye_y))
        throw DegenerateEyes("eye coordinates outside image bounds");
    if (left_eye_x == right_eye_x && left_eye_y == right_eye_y)
        throw DegenerateEyes("coincident eye coordinates");
    if (!(right_eye_x > left_eye_x))
        throw DegenerateEyes("right eye must lie to the right of the left eye");

    // Similarity transform taking the canonical eye segment onto the source
    // one, expressed as complex multiplication plus translation.
    const double span = kCanonicalRightEyeX - kCanonicalLeftEyeX;
    const double a = (right_eye_x - left_eye_x) / span;
    const double b = (right_eye_y - left_eye_y) / span;

    AlignedFace face;
    face.vector.resize(static_cast<std::size_t>(kCropWidth) * kCropHeight);
    const double tx = left_eye_x - (a * kCanonicalLeftEyeX - b * kCanonicalEyeY);
    const double ty = left_eye_y - (b * kCanonicalLeftEyeX + a * kCanonicalEyeY);
    face.geometry = {a, b, tx, ty};

    for (int v = 0; v < kCropHeight; ++v) {
        for (int u = 0; u < kCropWidth; ++u) {
            const double sx = tx + a * u - b * v;
            const double sy = ty + b * u + a * v;
            face.vector[static_cast<std::size_t>(v) * kCropWidth + u] = img.sample(sx, sy);
        }
    }

    // Photometric normalization: zero mean, unit L2 norm.
    const double mean =
        std::accumulate(face.vector.begin(), face.vector.end(), 0.0) / face.vector.size();
    double sq = 0.0;
    for (auto& p : face.vector) {
        p -= mean;
        sq += p * p;
    }
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) throw DegenerateEyes("constant crop, cannot normalize");
    for (auto& p : face.vector) p /= norm;
    return face;
}

EigenModel train_eigenmodel(const std::vector<AlignedFace>& faces, int k) {
    if (faces.size() < 2) throw TooFewFaces("need at least 2 faces, got " +
                                            std::to_string(faces.size()));
    if (k < 1) throw Error("k must be >= 1");
    const std::size_t d = faces.front().vector.size();
    for (const auto& f : faces)
        if (f.vector.size() != d) throw ShapeMismatch("inconsistent face vector lengths");
    const std::size_t n = faces.size();

    EigenModel model;
    model.mean.assign(d, 0.0);
    for (const auto& f : faces)
        for (std::size_t i = 0; i < d; ++i) model.mean[i] += f.vector[i];
    for (auto& m : model.mean) m /= static_cast<double>(n);

    // Snapshot method: eigen-decompose the n x n Gram matrix of centered
    // vectors instead of the d x d covariance.
    Eigen::MatrixXd centered(d, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < d; ++i)
            centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                faces[j].vector[i] - model.mean[i];

    const Eigen::MatrixXd gram = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw Error("eigen decomposition failed");

    // Ascending from the solver; walk from the back for descending order.
    const auto& evals = solver.eigenvalues();
    const auto& evecs = solver.eigenvectors();
    const double tol = std::max(evals.cwiseAbs().maxCoeff(), 1.0e-300) * 1e-10;

    for (Eigen::Index idx = static_cast<Eigen::Index>(n) - 1;
         idx >= 0 && static_cast<int>(model.basis.size()) < k; --idx) {
        const double lambda = evals(idx);
        if (lambda <= tol) break;  // rank reached
        Eigen::VectorXd component = centered * evecs.col(idx);
        component /= component.norm();
        model.basis.emplace_back(component.data(), component.data() + d);
        // Covariance eigenvalue, 1/n convention.
        model.eigenvalues.push_back(lambda / static_cast<double>(n));
    }
    if (model.basis.empty()) throw TooFewFaces("training set has rank 0");
    return model;
}

int pick_k_by_mass(const std::vector<double>& eigenvalues, double mass) {
    const double total = std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
    if (total <= 0.0) return 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        acc += eigenvalues[i];
        if (acc >= mass * total) return static_cast<int>(i + 1);
    }
    return static_cast<int>(eigenvalues.size());
}

std::vector<double> project(const EigenModel& model, const AlignedFace& face) {
    if (face.vector.size() != model.dimension())
        throw ShapeMismatch("face vector length does not match model dimension");
    std::vector<double> coeffs(model.k());
    for (std::size_t c = 0; c < model.k(); ++c) {
        double acc = 0.0;
        const auto& component = model.basis[c];
        for (std::size_t i = 0; i < component.size(); ++i)
            acc += component[i] * (face.vector[i] - model.mean[i]);
        coeffs[c] = acc;
    }
    return coeffs;
}

double similarity(const EigenModel& model, const AlignedFace& a, const AlignedFace& b) {
    const auto ca = project(model, a);
    const auto cb = project(model, b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        dot += ca[i] * cb[i];
        na += ca[i] * ca[i];
        nb += cb[i] * cb[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-12 || nb < 1e-12)
        throw ZeroProjection("projected coefficient vector has near-zero norm");
    return dot / (na * nb);
}

ScoreMatrix import_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open score matrix: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty score-matrix file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#gallery,", 0) != 0)
        throw ParseError("score matrix must start with '#gallery,': " + path.string());

    ScoreMatrix m;
    {
        std::istringstream header(line.substr(9));
        std::string id;
        while (std::getline(header, id, ',')) {
            if (id.empty()) throw ParseError("empty gallery id in header");
            m.gallery_ids.push_back(id);
        }
    }
    if (m.gallery_ids.empty()) throw ParseError("score matrix has no gallery ids");

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        if (!std::getline(row, field, ',') || field.empty())
            throw ParseError("missing probe id at line " + std::to_string(lineno));
        m.probe_ids.push_back(field);
        std::size_t cols = 0;
        while (std::getline(row, field, ',')) {
            char* end = nullptr;
            const double v = std::strtod(field.c_str(), &end);
            if (end != field.c_str() + field.size())
                throw ParseError("bad score '" + field + "' at line " + std::to_string(lineno));
            if (!std::isfinite(v))
                throw NonFiniteScore("non-finite score at line " + std::to_string(lineno));
            m.scores.push_back(v);
            ++cols;
        }
        if (cols != m.gallery_ids.size())
            throw ShapeMismatch("line " + std::to_string(lineno) + " has " + std::to_string(cols) +
                                " scores, expected " + std::to_string(m.gallery_ids.size()));
    }
    if (m.probe_ids.empty()) throw ParseError("score matrix has no probe rows");
    return m;
}

void export_scores(const ScoreMatrix& matrix, const std::filesystem::path& path) {
    if (matrix.scores.size() != matrix.probe_ids.size() * matrix.gallery_ids.size())
        throw ShapeMismatch("score buffer does not match id list lengths");
    for (double v : matrix.scores)
        if (!std::isfinite(v)) throw NonFiniteScore("refusing to export non-finite score");

    std::ofstream out(path);
    if (!out) throw IOError("cannot write score matrix: " + path.string());
    out << "#gallery";
    for (const auto& id : matrix.gallery_ids) out << ',' << id;
    out << '\n';
    char buf[40];
    for (std::size_t p = 0; p < matrix.probe_ids.size(); ++p) {
        out << matrix.probe_ids[p];
        for (std::size_t g = 0; g < matrix.gallery_ids.size(); ++g) {
            std::snprintf(buf, sizeof(buf), "%.17g", matrix.at(p, g));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw IOError("short write: " + path.string());
}

}  // namespace uniq
