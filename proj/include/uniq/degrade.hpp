#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "uniq/dataset.hpp"
#include "uniq/image.hpp"

namespace uniq {

/// Horizontal 1xN averaging blur with replicate-edge padding.
/// N must be odd, >= 3 and <= image width.
GrayImage motion_blur(const GrayImage& img, int length);

/// i.i.d. Normal(0, variance) samples, bit-reproducible from `seed`.
///
/// Generator pinned for cross-platform reproducibility: std::mt19937_64
/// driving Marsaglia's polar method, uniforms built as (rng() >> 11) * 2^-53.
std::vector<double> gaussian_noise_field(std::size_t count, double variance, std::uint64_t seed);

/// Adds zero-mean Gaussian noise and clamps the result to [0,1].
GrayImage gaussian_noise(const GrayImage& img, double variance, std::uint64_t seed);

/// Stable per-image seed: FNV-1a over (master_seed LE bytes, image_path, NUL,
/// condition_tag). Keeps parallel runs reproducible regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view image_path,
                          std::string_view condition_tag);

/// Applies `condition` to an image. Baseline and pose conditions are identity
/// transforms (pose is a selection label, not a synthesized view).
GrayImage apply_condition(const GrayImage& img, const QualityCondition& condition,
                          std::uint64_t seed);

}  // namespace uniq
