#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace cpsurf {

/// Values stored on band points, one array per channel. A field is meant to
/// be a closest point extension (constant along surface normals); the
/// `extended` flag records whether that currently holds.
class SurfaceField {
public:
    SurfaceField() = default;
    SurfaceField(std::size_t points, int channels, double value = 0.0)
        : points_(points), channels_(channels), data_(points * static_cast<std::size_t>(channels), value) {
        if (channels < 1) throw ConfigError("surface field needs at least one channel");
    }

    static SurfaceField scalar(std::vector<double> values, bool extended = true) {
        SurfaceField f;
        f.points_ = values.size();
        f.channels_ = 1;
        f.data_ = std::move(values);
        f.extended = extended;
        return f;
    }

    std::size_t size() const { return points_; }
    int channels() const { return channels_; }

    std::span<double> channel(int c) { return {data_.data() + c * points_, points_}; }
    std::span<const double> channel(int c) const { return {data_.data() + c * points_, points_}; }

    double& operator()(std::size_t i, int c = 0) { return data_[c * points_ + i]; }
    double operator()(std::size_t i, int c = 0) const { return data_[c * points_ + i]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    bool extended = false;

private:
    std::size_t points_ = 0;
    int channels_ = 1;
    std::vector<double> data_;
};

/// Per-band-point symmetric 3x3 tensor stored as six component arrays in
/// the order xx, xy, xz, yy, yz, zz.
struct TensorField {
    enum Component { xx = 0, xy = 1, xz = 2, yy = 3, yz = 4, zz = 5 };

    TensorField() = default;
    explicit TensorField(std::size_t points) {
        for (auto& c : comp) c.assign(points, 0.0);
    }

    std::size_t size() const { return comp[0].size(); }

    Mat3 at(std::size_t i) const {
        Mat3 m;
        m << comp[xx][i], comp[xy][i], comp[xz][i], comp[xy][i], comp[yy][i], comp[yz][i], comp[xz][i],
            comp[yz][i], comp[zz][i];
        return m;
    }

    void set(std::size_t i, const Mat3& m) {
        comp[xx][i] = m(0, 0);
        comp[xy][i] = 0.5 * (m(0, 1) + m(1, 0));
        comp[xz][i] = 0.5 * (m(0, 2) + m(2, 0));
        comp[yy][i] = m(1, 1);
        comp[yz][i] = 0.5 * (m(1, 2) + m(2, 1));
        comp[zz][i] = m(2, 2);
    }

    /// Component index of entry (r, c).
    static constexpr int index(int r, int c) {
        constexpr int table[3][3] = {{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}};
        return table[r][c];
    }

    std::array<std::vector<double>, 6> comp;
};

} // namespace cpsurf
