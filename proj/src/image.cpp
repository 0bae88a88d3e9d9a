#include "uniq/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <png.h>

#include "uniq/errors.hpp"

namespace uniq {

double GrayImage::sample(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    const double bot = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

namespace {

std::string lower_ext(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path.string());

    auto next_token = [&in, &path]() -> std::string {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return tok;
        }
        throw ParseError("truncated PGM header: " + path.string());
    };

    if (next_token() != "P5") throw ParseError("not a binary PGM: " + path.string());
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w < 1 || h < 1) throw ParseError("bad PGM dimensions: " + path.string());
    if (maxval != 255) throw ParseError("only 8-bit PGM supported: " + path.string());
    in.get();  // single whitespace after maxval

    std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw ParseError("truncated PGM pixel data: " + path.string());

    GrayImage img(w, h);
    for (std::size_t i = 0; i < raw.size(); ++i) img.data[i] = raw[i] / 255.0;
    return img;
}

void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path.string());
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> raw(img.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<unsigned char>(std::lround(std::clamp(img.data[i], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IOError("short write: " + path.string());
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

GrayImage read_png(const std::filesystem::path& path) {
    PngReadCloser c;
    c.fp = std::fopen(path.string().c_str(), "rb");
    if (!c.fp) throw IOError("cannot open " + path.string());

    c.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!c.png) throw IOError("png_create_read_struct failed");
    c.info = png_create_info_struct(c.png);
    if (!c.info) throw IOError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(c.png))) throw ParseError("corrupt PNG: " + path.string());

    png_init_io(c.png, c.fp);
    png_read_info(c.png, c.info);

    png_set_strip_16(c.png);
    png_set_palette_to_rgb(c.png);
    png_set_expand_gray_1_2_4_to_8(c.png);
    png_set_strip_alpha(c.png);
    png_read_update_info(c.png, c.info);

    const int w = static_cast<int>(png_get_image_width(c.png, c.info));
    const int h = static_cast<int>(png_get_image_height(c.png, c.info));
    const int channels = png_get_channels(c.png, c.info);

    std::vector<unsigned char> row(static_cast<std::size_t>(w) * channels);
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        png_read_row(c.png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int ch = 0; ch < channels; ++ch) acc += row[static_cast<std::size_t>(x) * channels + ch];
            img.at(x, y) = acc / (channels * 255.0);
        }
    }
    png_read_end(c.png, nullptr);
    return img;
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (fp) std::fclose(fp);
    }
};

void write_png(const GrayImage& img, const std::filesystem::path& path) {
    PngWriteCloser c;
    c.fp = std::fopen(path.string().c_str(), "wb");
    if (!c.fp) throw IOError("cannot write " + path.string());

    c.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!c.png) throw IOError("png_create_write_struct failed");
    c.info = png_create_info_struct(c.png);
    if (!c.info) throw IOError("png_create_info_struct failed");
    if (setjmp(png_jmpbuf(c.png))) throw IOError("PNG write failed: " + path.string());

    png_init_io(c.png, c.fp);
    png_set_IHDR(c.png, c.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(c.png, c.info);

    std::vector<unsigned char> row(static_cast<std::size_t>(img.width));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            row[static_cast<std::size_t>(x)] =
                static_cast<unsigned char>(std::lround(std::clamp(img.at(x, y), 0.0, 1.0) * 255.0));
        png_write_row(c.png, row.data());
    }
    png_write_end(c.png, nullptr);
}

}  // namespace

GrayImage read_image(const std::filesystem::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm") return read_pgm(path);
    throw ParseError("unsupported image extension: " + path.string());
}

void write_image(const GrayImage& img, const std::filesystem::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".png") return write_png(img, path);
    if (ext == ".pgm") return write_pgm(img, path);
    throw IOError("unsupported image extension: " + path.string());
}

std::uint64_t image_checksum(const GrayImage& img) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const unsigned char* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    mix(reinterpret_cast<const unsigned char*>(&img.width), sizeof(img.width));
    mix(reinterpret_cast<const unsigned char*>(&img.height), sizeof(img.height));
    mix(reinterpret_cast<const unsigned char*>(img.data.data()), img.data.size() * sizeof(double));
    return h;
}

}  // namespace uniq
