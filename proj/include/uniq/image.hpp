#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace uniq {

/// Grayscale image with luminance values in [0,1], stored row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    bool in_bounds(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x < width && y < height;
    }

    /// Bilinear sample with clamp-to-edge behaviour.
    double sample(double x, double y) const;
};

/// Reads an 8-bit grayscale PNG or PGM (binary P5) image; pixel v maps to v/255.
/// Color PNG input is reduced to gray by channel average.
GrayImage read_image(const std::filesystem::path& path);

/// Writes an 8-bit grayscale PNG or PGM image; value v maps to round(v*255).
/// Format chosen by file extension (.png or .pgm).
void write_image(const GrayImage& img, const std::filesystem::path& path);

/// FNV-1a hash of the raw pixel buffer, used to assert images are untouched.
std::uint64_t image_checksum(const GrayImage& img);

}  // namespace uniq
