#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cpsurf {

// ---------------------------------------------------------------------------
// Portable randomness
// ---------------------------------------------------------------------------

/// Reproducible random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the conversions below are written
/// out explicitly (standard distributions are implementation-defined), so a
/// seed produces the same numbers on every platform and in any language
/// that implements MT19937-64:
///   uniform  = (next() >> 11) * 2^-53            in [0, 1)
///   index(n) = floor(uniform * n)
///   normal   = Box-Muller on two uniforms, cos branch
class Random {
public:
    explicit Random(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

/// Stateless hash of a lattice point to [0, 1) (splitmix64 finalizer).
inline double lattice_hash(int64_t x, int64_t y, uint64_t seed) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(x) + 0xC2B2AE3D27D4EB4Full * static_cast<uint64_t>(y);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

/// Smoothly interpolated lattice noise in [0, 1).
inline double value_noise(double x, double y, uint64_t seed) {
    const double fx = std::floor(x), fy = std::floor(y);
    const auto ix = static_cast<int64_t>(fx), iy = static_cast<int64_t>(fy);
    auto fade = [](double t) { return t * t * (3.0 - 2.0 * t); };
    const double tx = fade(x - fx), ty = fade(y - fy);
    const double a = lattice_hash(ix, iy, seed), b = lattice_hash(ix + 1, iy, seed);
    const double c = lattice_hash(ix, iy + 1, seed), d = lattice_hash(ix + 1, iy + 1, seed);
    return (a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty;
}

/// Sum of octaves of value noise, normalized to [0, 1).
inline double turbulence(double x, double y, int octaves, uint64_t seed) {
    double sum = 0.0, amp = 1.0, norm = 0.0, freq = 1.0;
    for (int o = 0; o < octaves; ++o) {
        sum += amp * value_noise(x * freq, y * freq, seed + static_cast<uint64_t>(o));
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    return sum / norm;
}

// ---------------------------------------------------------------------------
// Raster images
// ---------------------------------------------------------------------------

/// Row-major interleaved image with values in [0, 1]. Pixel (x, y) covers
/// [x/W, (x+1)/W] x [y/H, (y+1)/H] of the unit texture square, row 0 on top.
class RasterImage {
public:
    RasterImage() = default;
    RasterImage(int width, int height, int channels, double value = 0.0)
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, value) {
        if (width < 1 || height < 1) throw ConfigError("image dimensions must be >= 1");
        if (channels != 1 && channels != 3) throw ConfigError("images have 1 or 3 channels");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }

    double& at(int x, int y, int c = 0) { return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c]; }
    double at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    const std::vector<double>& data() const { return data_; }

    /// Bilinear sample at texture coordinates (u, v) in [0, 1]^2. u wraps
    /// around (periodic), v is clamped.
    double sample(double u, double v, int c) const {
        const double x = u * width_ - 0.5;
        const double y = std::clamp(v * height_ - 0.5, 0.0, static_cast<double>(height_ - 1));
        const double fx = std::floor(x), fy = std::floor(y);
        const double tx = x - fx, ty = y - fy;
        auto wrap = [&](long i) { return static_cast<int>(((i % width_) + width_) % width_); };
        const int x0 = wrap(static_cast<long>(fx)), x1 = wrap(static_cast<long>(fx) + 1);
        const int y0 = static_cast<int>(fy), y1 = std::min(y0 + 1, height_ - 1);
        return (at(x0, y0, c) * (1 - tx) + at(x1, y0, c) * tx) * (1 - ty) +
               (at(x0, y1, c) * (1 - tx) + at(x1, y1, c) * tx) * ty;
    }

    /// Bilinear sample with both axes clamped (non-periodic textures).
    double sample_clamped(double u, double v, int c) const {
        const double x = std::clamp(u * width_ - 0.5, 0.0, static_cast<double>(width_ - 1));
        const double y = std::clamp(v * height_ - 0.5, 0.0, static_cast<double>(height_ - 1));
        const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
        const int x1 = std::min(x0 + 1, width_ - 1), y1 = std::min(y0 + 1, height_ - 1);
        const double tx = x - x0, ty = y - y0;
        return (at(x0, y0, c) * (1 - tx) + at(x1, y0, c) * tx) * (1 - ty) +
               (at(x0, y1, c) * (1 - tx) + at(x1, y1, c) * tx) * ty;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 1;
    std::vector<double> data_;
};

inline RasterImage load_png(const std::string& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) {
        throw IoError("cannot read PNG '" + path + "': " + image.message);
    }
    const bool gray = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("cannot decode PNG '" + path + "': " + image.message);
    }
    RasterImage out(static_cast<int>(image.width), static_cast<int>(image.height), gray ? 1 : 3);
    std::size_t k = 0;
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            for (int c = 0; c < out.channels(); ++c) out.at(x, y, c) = buffer[k++] / 255.0;
        }
    }
    return out;
}

inline void save_png(const std::string& path, const RasterImage& img) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    std::vector<png_byte> buffer;
    buffer.reserve(img.data().size());
    for (double v : img.data()) buffer.push_back(static_cast<png_byte>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
        throw IoError("cannot write PNG '" + path + "': " + image.message);
    }
}

// ---------------------------------------------------------------------------
// Generated textures
// ---------------------------------------------------------------------------

/// Alternating black/white bands along the horizontal texture axis:
/// value = floor(2 * count * u) mod 2.
inline RasterImage make_stripes(int width, int height, int count) {
    RasterImage img(width, height, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width;
            img.at(x, y) = static_cast<int>(std::floor(2.0 * count * u)) % 2;
        }
    }
    return img;
}

inline RasterImage make_checkerboard(int width, int height, int cells_u, int cells_v) {
    RasterImage img(width, height, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const int cu = static_cast<int>(std::floor((x + 0.5) / width * cells_u));
            const int cv = static_cast<int>(std::floor((y + 0.5) / height * cells_v));
            img.at(x, y) = (cu + cv) % 2;
        }
    }
    return img;
}

/// Wood grain: rings around an off-centre log axis, distorted by
/// turbulence, shaded between a dark and a light wood colour.
inline RasterImage make_wood_grain(int width, int height, uint64_t seed, double rings = 9.0) {
    RasterImage img(width, height, 3);
    const std::array<double, 3> light{0.86, 0.69, 0.47};
    const std::array<double, 3> dark{0.45, 0.26, 0.11};
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width, v = (y + 0.5) / height;
            const double dx = u - 0.5, dy = 2.0 * (v - 0.45);
            const double r = std::hypot(dx, dy) + 0.12 * turbulence(6.0 * u, 6.0 * v, 4, seed);
            const double ring = r * rings - std::floor(r * rings);
            // Sharp-edged late wood: dark for the first 30% of each ring.
            const double t = ring < 0.3 ? 0.0 : 1.0;
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = dark[c] + t * (light[c] - dark[c]);
        }
    }
    return img;
}

/// Fingerprint-like pattern: dark ridges along concentric, slightly
/// wobbling ellipses, interrupted where low-frequency noise exceeds
/// `1 - gap_fraction` (interruptions are paper white).
inline RasterImage make_fingerprint(int width, int height, uint64_t seed, double ridges = 14.0,
                                    double gap_fraction = 0.25) {
    RasterImage img(width, height, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width - 0.5, v = (y + 0.5) / height - 0.55;
            const double wobble = 0.04 * (turbulence(3.0 * u, 3.0 * v, 3, seed) - 0.5);
            const double r = std::hypot(u, 0.8 * v) + wobble;
            const double phase = r * ridges - std::floor(r * ridges);
            double value = phase < 0.5 ? 0.0 : 1.0;
            if (value_noise(12.0 * (u + 0.5), 12.0 * (v + 0.5), seed ^ 0xF1F1ull) > 1.0 - gap_fraction) value = 1.0;
            img.at(x, y) = value;
        }
    }
    return img;
}

} // namespace cpsurf
