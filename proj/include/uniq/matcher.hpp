#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "uniq/image.hpp"

namespace uniq {

// Canonical alignment geometry.
inline constexpr int kCropWidth = 64;
inline constexpr int kCropHeight = 80;
inline constexpr double kCanonicalLeftEyeX = 16.0;
inline constexpr double kCanonicalRightEyeX = 48.0;
inline constexpr double kCanonicalEyeY = 24.0;

/// Geometrically and photometrically normalized face crop.
/// vector has kCropWidth*kCropHeight entries, zero mean and unit L2 norm.
struct AlignedFace {
    std::vector<double> vector;
    // Similarity transform canonical -> source: (x,y) = (tx,ty) + A*(u,v)
    // with A = [[a, -b], [b, a]]. Stored as {a, b, tx, ty}.
    std::array<double, 4> geometry{};
};

/// Similarity-transform alignment from manually labeled eye coordinates.
/// Requires eyes in bounds, distinct, and right_eye_x > left_eye_x.
AlignedFace align(const GrayImage& img, double left_eye_x, double left_eye_y,
                  double right_eye_x, double right_eye_y);

struct EigenModel {
    std::vector<double> mean;                 // length d
    std::vector<std::vector<double>> basis;   // k orthonormal vectors of length d
    std::vector<double> eigenvalues;          // descending, length k
    std::size_t dimension() const { return mean.size(); }
    std::size_t k() const { return basis.size(); }
};

/// PCA on mean-subtracted face vectors; keeps the top-k components by
/// eigenvalue, with k clipped to the numerical rank of the training set.
EigenModel train_eigenmodel(const std::vector<AlignedFace>& faces, int k);

/// Smallest k whose leading eigenvalues capture `mass` of the total.
int pick_k_by_mass(const std::vector<double>& eigenvalues, double mass);

std::vector<double> project(const EigenModel& model, const AlignedFace& face);

/// Cosine similarity of the projected coefficient vectors, in [-1,1].
/// Throws ZeroProjection when either projection has norm < 1e-12.
double similarity(const EigenModel& model, const AlignedFace& a, const AlignedFace& b);

struct ScoreMatrix {
    std::vector<std::string> probe_ids;
    std::vector<std::string> gallery_ids;
    std::vector<double> scores;  // row-major, probes x gallery

    double at(std::size_t probe, std::size_t gallery) const {
        return scores[probe * gallery_ids.size() + gallery];
    }
    double& at(std::size_t probe, std::size_t gallery) {
        return scores[probe * gallery_ids.size() + gallery];
    }
};

/// Score-matrix file format:
///   line 1:  #gallery,<id>,<id>,...
///   line 2+: <probe_id>,<score>,...   (17 significant digits)
ScoreMatrix import_scores(const std::filesystem::path& path);
void export_scores(const ScoreMatrix& matrix, const std::filesystem::path& path);

}  // namespace uniq
