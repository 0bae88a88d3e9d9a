#include "uniq/degrade.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "uniq/errors.hpp"

namespace uniq {

GrayImage motion_blur(const GrayImage& img, int length) {
    if (length < 3 || length % 2 == 0)
        throw BadLength("blur length must be an odd integer >= 3, got " + std::to_string(length));
    if (length > img.width)
        throw KernelTooWide("blur length " + std::to_string(length) + " exceeds image width " +
                            std::to_string(img.width));

    const int half = length / 2;
    const double inv_n = 1.0 / length;
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int k = -half; k <= half; ++k) {
                const int xs = std::clamp(x + k, 0, img.width - 1);  // replicate padding
                acc += img.at(xs, y);
            }
            out.at(x, y) = acc * inv_n;
        }
    }
    return out;
}

namespace {

class PolarGaussian {
public:
    explicit PolarGaussian(std::uint64_t seed) : rng_(seed) {}

    double next(double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_ * sigma;
        }
        double v1, v2, s;
        do {
            v1 = 2.0 * uniform() - 1.0;
            v2 = 2.0 * uniform() - 1.0;
            s = v1 * v1 + v2 * v2;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v2 * f;
        have_spare_ = true;
        return v1 * f * sigma;
    }

private:
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

std::vector<double> gaussian_noise_field(std::size_t count, double variance, std::uint64_t seed) {
    if (!(variance > 0.0))
        throw BadVariance("noise variance must be > 0, got " + std::to_string(variance));
    const double sigma = std::sqrt(variance);
    PolarGaussian gen(seed);
    std::vector<double> field(count);
    for (auto& v : field) v = gen.next(sigma);
    return field;
}

GrayImage gaussian_noise(const GrayImage& img, double variance, std::uint64_t seed) {
    const auto field = gaussian_noise_field(img.data.size(), variance, seed);
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = std::clamp(img.data[i] + field[i], 0.0, 1.0);
    return out;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view image_path,
                          std::string_view condition_tag) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](unsigned char b) {
        h ^= b;
        h *= 1099511628211ULL;
    };
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(master_seed >> (8 * i)));
    for (char c : image_path) mix(static_cast<unsigned char>(c));
    mix(0);
    for (char c : condition_tag) mix(static_cast<unsigned char>(c));
    return h;
}

GrayImage apply_condition(const GrayImage& img, const QualityCondition& condition,
                          std::uint64_t seed) {
    switch (condition.kind) {
        case QualityCondition::Kind::Baseline:
        case QualityCondition::Kind::Pose:
            return img;
        case QualityCondition::Kind::MotionBlur:
            return motion_blur(img, condition.blur_length);
        case QualityCondition::Kind::GaussianNoise:
            return gaussian_noise(img, condition.noise_variance, seed);
    }
    throw Error("unreachable condition kind");
}

}  // namespace uniq
