#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace cpsurf {

using GridIndex = std::array<int, 3>;

/// Uniform Cartesian grid: point (i, j, k) sits at origin + h * (i, j, k)
/// for 0 <= i < extents[0], etc.
struct GridSpec {
    Vec3 origin = Vec3::Constant(-1.5);
    double h = 0.0125;
    std::array<int, 3> extents{241, 241, 241};

    /// Grid with spacing h whose nodes cover the box [lo, hi] (the upper
    /// end is rounded up to the next node).
    static GridSpec covering(const Vec3& lo, const Vec3& hi, double h) {
        if (!(h > 0.0)) throw ConfigError("grid spacing h must be positive");
        GridSpec spec;
        spec.origin = lo;
        spec.h = h;
        for (int a = 0; a < 3; ++a) {
            if (!(hi[a] > lo[a])) throw ConfigError("grid box must have positive size");
            spec.extents[a] = static_cast<int>(std::ceil((hi[a] - lo[a]) / h - 1e-9)) + 1;
        }
        return spec;
    }

    Vec3 position(const GridIndex& g) const {
        return origin + h * Vec3(g[0], g[1], g[2]);
    }

    bool contains(const GridIndex& g) const {
        for (int a = 0; a < 3; ++a) {
            if (g[a] < 0 || g[a] >= extents[a]) return false;
        }
        return true;
    }

    std::size_t linear(const GridIndex& g) const {
        return (static_cast<std::size_t>(g[0]) * extents[1] + g[1]) * extents[2] + g[2];
    }

    std::size_t total() const {
        return static_cast<std::size_t>(extents[0]) * extents[1] * extents[2];
    }

    void validate() const {
        if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("grid spacing h must be positive");
        for (int a = 0; a < 3; ++a) {
            if (extents[a] < 1) throw ConfigError("grid extents must be >= 1 per axis");
        }
    }
};

/// Radius of the computational band for a degree-p interpolant combined
/// with a finite difference stencil of radius s:
///   r = sqrt(3) * h * ((p + 1) / 2 + s + 1).
/// The sqrt(3) covers diagonal offsets of the cubic footprint; the extra
/// cell is a safety layer.
inline double compute_band_radius(int interp_degree, int fd_stencil_radius, double h) {
    return std::sqrt(3.0) * h * ((interp_degree + 1) / 2.0 + fd_stencil_radius + 1.0);
}

/// Number of grid points an interpolant of degree p uses in d dimensions.
inline constexpr int interpolation_footprint_size(int degree, int dim) {
    int n = 1;
    for (int k = 0; k < dim; ++k) n *= degree + 1;
    return n;
}

enum class Axis : int { x = 0, y = 1, z = 2 };

/// The narrow band of grid points within `radius` of a surface, in
/// lexicographic (i, j, k) order, with closest points sampled at every band
/// point and axis-neighbour topology for stencils.
class BandedGrid {
public:
    // Neighbour slots: 2 * axis + (0 for minus, 1 for plus).
    static constexpr int minus(int axis) { return 2 * axis; }
    static constexpr int plus(int axis) { return 2 * axis + 1; }

    BandedGrid() = default;

    const GridSpec& spec() const { return spec_; }
    double h() const { return spec_.h; }
    double radius() const { return radius_; }
    std::size_t size() const { return points_.size(); }

    const std::vector<GridIndex>& points() const { return points_; }
    const GridIndex& point(std::size_t i) const { return points_[i]; }
    Vec3 position(std::size_t i) const { return spec_.position(points_[i]); }

    /// Band index of a grid point, -1 when it is not in the band.
    int index_of(const GridIndex& g) const {
        if (!spec_.contains(g)) return -1;
        return index_map_[spec_.linear(g)];
    }

    int neighbor(std::size_t i, int slot) const { return neighbors_[i][slot]; }
    const std::array<int32_t, 6>& neighbors(std::size_t i) const { return neighbors_[i]; }

    /// Sampled closest point of band point i.
    const SurfacePoint& closest(std::size_t i) const { return closest_[i]; }
    const std::vector<SurfacePoint>& closest_points() const { return closest_; }

    /// 0: some axis neighbour missing; 1: all six neighbours in the band;
    /// 2: additionally every neighbour has depth >= 1. Second-level stencils
    /// (the anisotropic divergence) are valid at depth 2.
    int depth(std::size_t i) const { return depth_[i]; }

    friend BandedGrid build_band(const ClosestPointField& cp, const GridSpec& spec, double radius);
    friend BandedGrid band_from_points(const ClosestPointField& cp, const GridSpec& spec, double radius,
                                       std::vector<GridIndex> points);

private:
    void finalize(const ClosestPointField& cp) {
        index_map_.assign(spec_.total(), -1);
        for (std::size_t i = 0; i < points_.size(); ++i) {
            index_map_[spec_.linear(points_[i])] = static_cast<int32_t>(i);
        }
        const std::size_t n = points_.size();
        neighbors_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (int a = 0; a < 3; ++a) {
                GridIndex lo = points_[i], hi = points_[i];
                --lo[a];
                ++hi[a];
                neighbors_[i][minus(a)] = index_of(lo);
                neighbors_[i][plus(a)] = index_of(hi);
            }
        }
        depth_.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            bool full = true;
            for (int s = 0; s < 6; ++s) full = full && neighbors_[i][s] >= 0;
            depth_[i] = full ? 1 : 0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (depth_[i] == 0) continue;
            bool deep = true;
            for (int s = 0; s < 6; ++s) deep = deep && depth_[neighbors_[i][s]] >= 1;
            if (deep) depth_[i] = 2;
        }
        closest_.resize(n);
        std::string failure;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            try {
                closest_[i] = cp.closest(spec_.position(points_[i]));
            } catch (const DegenerateQuery& e) {
#pragma omp critical
                failure = e.what();
            }
        }
        if (!failure.empty()) {
            throw DegenerateQuery(failure + " (band radius exceeds the distance to the medial axis)");
        }
    }

    GridSpec spec_;
    double radius_ = 0.0;
    std::vector<GridIndex> points_;
    std::vector<int32_t> index_map_;
    std::vector<std::array<int32_t, 6>> neighbors_;
    std::vector<uint8_t> depth_;
    std::vector<SurfacePoint> closest_;
};

/// Collect every grid point within `radius` of the surface. Blocks of the
/// grid whose centre is farther than radius + block half-diagonal are
/// skipped (the distance function is 1-Lipschitz), so the result equals a
/// full scan of the box.
inline BandedGrid build_band(const ClosestPointField& cp, const GridSpec& spec, double radius) {
    spec.validate();
    if (!(radius > 0.0)) throw ConfigError("band radius must be positive");
    constexpr int block = 8;
    std::array<int, 3> nblocks{};
    for (int a = 0; a < 3; ++a) nblocks[a] = (spec.extents[a] + block - 1) / block;
    const std::size_t total_blocks = static_cast<std::size_t>(nblocks[0]) * nblocks[1] * nblocks[2];
    std::vector<uint8_t> active(total_blocks, 0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(total_blocks); ++b) {
        const int bz = static_cast<int>(b % nblocks[2]);
        const int by = static_cast<int>((b / nblocks[2]) % nblocks[1]);
        const int bx = static_cast<int>(b / (static_cast<std::ptrdiff_t>(nblocks[2]) * nblocks[1]));
        Vec3 lo, hi;
        const GridIndex g0{bx * block, by * block, bz * block};
        const GridIndex g1{std::min(g0[0] + block, spec.extents[0]) - 1,
                           std::min(g0[1] + block, spec.extents[1]) - 1,
                           std::min(g0[2] + block, spec.extents[2]) - 1};
        lo = spec.position(g0);
        hi = spec.position(g1);
        const Vec3 centre = 0.5 * (lo + hi);
        const double half_diag = 0.5 * (hi - lo).norm();
        active[b] = cp.distance(centre) <= radius + half_diag + 1e-12 ? 1 : 0;
    }

    BandedGrid band;
    band.spec_ = spec;
    band.radius_ = radius;
    for (int i = 0; i < spec.extents[0]; ++i) {
        for (int j = 0; j < spec.extents[1]; ++j) {
            const std::size_t row = (static_cast<std::size_t>(i / block) * nblocks[1] + j / block) * nblocks[2];
            for (int k = 0; k < spec.extents[2]; ++k) {
                if (!active[row + k / block]) {
                    k = (k / block + 1) * block - 1;
                    continue;
                }
                const GridIndex g{i, j, k};
                if (cp.distance(spec.position(g)) <= radius) band.points_.push_back(g);
            }
        }
    }
    if (band.points_.empty()) {
        throw EmptyBand("no grid point lies within the band radius of the surface");
    }
    for (const auto& g : band.points_) {
        for (int a = 0; a < 3; ++a) {
            if (g[a] == 0 || g[a] == spec.extents[a] - 1) {
                throw BandTouchesBoxBoundary("band reaches the reference box boundary; enlarge the grid extents");
            }
        }
    }
    band.finalize(cp);
    return band;
}

/// Rebuild a band from a cached point list (see write_band).
inline BandedGrid band_from_points(const ClosestPointField& cp, const GridSpec& spec, double radius,
                                   std::vector<GridIndex> points) {
    spec.validate();
    if (points.empty()) throw EmptyBand("cached band has no points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!spec.contains(points[i])) throw IoError("cached band point outside the grid");
        if (i > 0 && !(points[i - 1] < points[i])) throw IoError("cached band points are not in lexicographic order");
    }
    BandedGrid band;
    band.spec_ = spec;
    band.radius_ = radius;
    band.points_ = std::move(points);
    band.finalize(cp);
    return band;
}

// Text dump: one header line, then one "i j k" triple per line.
//   cpsurf-band h=<h> origin=<x>,<y>,<z> extents=<nx>,<ny>,<nz> radius=<r> points=<N>
inline void write_band(std::ostream& out, const BandedGrid& band) {
    const auto& s = band.spec();
    std::ostringstream header;
    header.precision(17);
    header << "cpsurf-band h=" << s.h << " origin=" << s.origin.x() << ',' << s.origin.y() << ','
           << s.origin.z() << " extents=" << s.extents[0] << ',' << s.extents[1] << ',' << s.extents[2]
           << " radius=" << band.radius() << " points=" << band.size() << '\n';
    out << header.str();
    for (const auto& g : band.points()) out << g[0] << ' ' << g[1] << ' ' << g[2] << '\n';
    if (!out) throw IoError("failed writing band dump");
}

struct BandDump {
    GridSpec spec;
    double radius = 0.0;
    std::vector<GridIndex> points;
};

inline BandDump read_band(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("band dump: missing header");
    BandDump dump;
    std::size_t count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "cpsurf-band") throw IoError("band dump: bad magic '" + tag + "'");
    std::string item;
    int seen = 0;
    while (hs >> item) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw IoError("band dump: malformed header field '" + item + "'");
        const std::string key = item.substr(0, eq);
        std::istringstream vs(item.substr(eq + 1));
        if (key == "h") {
            vs >> dump.spec.h;
        } else if (key == "origin") {
            vs >> dump.spec.origin.x() >> c1 >> dump.spec.origin.y() >> c2 >> dump.spec.origin.z();
        } else if (key == "extents") {
            vs >> dump.spec.extents[0] >> c1 >> dump.spec.extents[1] >> c2 >> dump.spec.extents[2];
        } else if (key == "radius") {
            vs >> dump.radius;
        } else if (key == "points") {
            vs >> count;
        } else {
            throw IoError("band dump: unknown header field '" + key + "'");
        }
        if (!vs) throw IoError("band dump: bad value for '" + key + "'");
        ++seen;
    }
    if (seen != 5) throw IoError("band dump: incomplete header");
    dump.points.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto& g = dump.points[i];
        if (!(in >> g[0] >> g[1] >> g[2])) throw IoError("band dump: truncated point list");
    }
    return dump;
}

} // namespace cpsurf
