#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uniq/image.hpp"

namespace uniq::synth {

/// Parameters of the bundled desk-scale parametric face generator.
/// Identity lives in small high-frequency blobs on top of a shared smooth
/// face, so heavy blur or noise strips it the way it would on real captures.
struct DatasetSpec {
    int n_subjects = 48;
    std::vector<std::string> sessions = {"s1", "s2"};
    std::uint64_t seed = 7;
    int width = 128;
    int height = 160;
};

double left_eye_x(const DatasetSpec& spec);
double right_eye_x(const DatasetSpec& spec);
double eye_y(const DatasetSpec& spec);

/// Shared identity-free face (the fixed-identity probe for experiment 1).
GrayImage average_face(const DatasetSpec& spec);

/// One capture of a subject: shared face + subject blobs + per-session
/// illumination gain and sensor noise. Deterministic in (spec.seed, subject,
/// session).
GrayImage subject_image(const DatasetSpec& spec, int subject, int session_index);

/// Writes PGM images plus manifest.csv into `dir`; returns the manifest path.
std::filesystem::path write_dataset(const std::filesystem::path& dir, const DatasetSpec& spec);

/// Writes the average-face probe as probe.pgm; returns its path.
std::filesystem::path write_probe(const std::filesystem::path& dir, const DatasetSpec& spec);

}  // namespace uniq::synth
