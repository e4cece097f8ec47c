#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "band.hpp"
#include "errors.hpp"
#include "field.hpp"

namespace cpsurf {

/// Row-compressed sparse matrix acting on band-indexed arrays.
class SparseOperator {
public:
    struct Entry {
        int32_t column;
        double weight;
    };

    SparseOperator() = default;
    explicit SparseOperator(std::size_t rows) : row_start_(rows + 1, 0) {}

    std::size_t rows() const { return row_start_.empty() ? 0 : row_start_.size() - 1; }
    std::size_t nonzeros() const { return entries_.size(); }

    std::span<const Entry> row(std::size_t i) const {
        return {entries_.data() + row_start_[i], entries_.data() + row_start_[i + 1]};
    }

    void apply(std::span<const double> in, std::span<double> out) const {
        assert(in.size() == rows() && out.size() == rows());
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows());
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (uint32_t k = row_start_[i]; k < row_start_[i + 1]; ++k) {
                acc += entries_[k].weight * in[entries_[k].column];
            }
            out[i] = acc;
        }
    }

    std::vector<double> apply(std::span<const double> in) const {
        std::vector<double> out(rows());
        apply(in, out);
        return out;
    }

    // Build rows in order: push entries for row i, then finish_row().
    void push(int32_t column, double weight) { entries_.push_back({column, weight}); }
    void finish_row(std::size_t i) { row_start_[i + 1] = static_cast<uint32_t>(entries_.size()); }

private:
    std::vector<uint32_t> row_start_;
    std::vector<Entry> entries_;
};

/// 7-point Laplacian. Rows of points missing an axis neighbour are empty;
/// the band construction keeps those points out of every interpolation
/// footprint, so their values never feed back into the surface solution.
inline SparseOperator assemble_laplacian(const BandedGrid& band) {
    const double inv_h2 = 1.0 / (band.h() * band.h());
    SparseOperator op(band.size());
    for (std::size_t i = 0; i < band.size(); ++i) {
        if (band.depth(i) >= 1) {
            const auto& nb = band.neighbors(i);
            op.push(nb[BandedGrid::minus(0)], inv_h2);
            op.push(nb[BandedGrid::minus(1)], inv_h2);
            op.push(nb[BandedGrid::minus(2)], inv_h2);
            op.push(static_cast<int32_t>(i), -6.0 * inv_h2);
            op.push(nb[BandedGrid::plus(2)], inv_h2);
            op.push(nb[BandedGrid::plus(1)], inv_h2);
            op.push(nb[BandedGrid::plus(0)], inv_h2);
        }
        op.finish_row(i);
    }
    return op;
}

// ---------------------------------------------------------------------------
// Tri-cubic closest point extension
// ---------------------------------------------------------------------------

/// Cubic Lagrange weights on nodes -1, 0, 1, 2 evaluated at t.
inline std::array<double, 4> cubic_lagrange_weights(double t) {
    return {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
}

/// Lower corner of the 4x4x4 block used to interpolate at p and the local
/// coordinate of p inside the central cell. The central cell is the one
/// containing p; on a grid plane the lower cell is taken.
struct CubicStencil {
    GridIndex base;  // first node of the block in each axis
    std::array<std::array<double, 4>, 3> weights;
};

inline CubicStencil cubic_stencil(const GridSpec& spec, const Vec3& p) {
    CubicStencil st;
    for (int a = 0; a < 3; ++a) {
        const double s = (p[a] - spec.origin[a]) / spec.h;
        const int cell = static_cast<int>(std::ceil(s)) - 1;
        st.base[a] = cell - 1;
        st.weights[a] = cubic_lagrange_weights(s - cell);
    }
    return st;
}

/// Tensor-product tri-cubic interpolation at the closest point of every
/// band point, stored in factored form: for each row the band index of the
/// first node of each of the 16 z-columns (the 4 nodes of a column are
/// consecutive in the lexicographic band order) and 4 weights per axis.
class ExtensionOperator {
public:
    ExtensionOperator() = default;

    std::size_t rows() const { return columns_.size(); }

    void apply(std::span<const double> in, std::span<double> out) const {
        assert(in.size() >= rows() && out.size() == rows());
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows());
        const double* src = in.data();
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto& col = columns_[i];
            const auto& w = weights_[i];
            double acc = 0.0;
            for (int a = 0; a < 4; ++a) {
                double acc_y = 0.0;
                for (int b = 0; b < 4; ++b) {
                    const double* p = src + col[4 * a + b];
                    acc_y += w[4 + b] * (w[8] * p[0] + w[9] * p[1] + w[10] * p[2] + w[11] * p[3]);
                }
                acc += w[a] * acc_y;
            }
            out[i] = acc;
        }
    }

    std::vector<double> apply(std::span<const double> in) const {
        std::vector<double> out(rows());
        apply(in, out);
        return out;
    }

    /// The 64 (column, weight) pairs of row i.
    std::vector<SparseOperator::Entry> row(std::size_t i) const {
        std::vector<SparseOperator::Entry> entries;
        entries.reserve(64);
        const auto& col = columns_[i];
        const auto& w = weights_[i];
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                for (int c = 0; c < 4; ++c) {
                    entries.push_back({col[4 * a + b] + c, w[a] * w[4 + b] * w[8 + c]});
                }
            }
        }
        return entries;
    }

    SparseOperator to_sparse() const {
        SparseOperator op(rows());
        for (std::size_t i = 0; i < rows(); ++i) {
            for (const auto& e : row(i)) op.push(e.column, e.weight);
            op.finish_row(i);
        }
        return op;
    }

    friend ExtensionOperator assemble_extension(const BandedGrid& band, int degree);

private:
    std::vector<std::array<int32_t, 16>> columns_;
    std::vector<std::array<double, 12>> weights_;
};

namespace detail {

// Fills the 16 column starts of the block at `st`, requiring every node to
// be a band point of depth >= 2 so that the stencils that produced the
// interpolated data were valid there.
inline bool block_columns(const BandedGrid& band, const CubicStencil& st, std::array<int32_t, 16>& columns) {
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const GridIndex g0{st.base[0] + a, st.base[1] + b, st.base[2]};
            const int first = band.index_of(g0);
            if (first < 0) return false;
            for (int c = 0; c < 4; ++c) {
                const int idx = first + c;
                if (static_cast<std::size_t>(idx) >= band.size()) return false;
                const auto& g = band.point(idx);
                if (g[0] != g0[0] || g[1] != g0[1] || g[2] != g0[2] + c) return false;
                if (band.depth(idx) < 2) return false;
            }
            columns[4 * a + b] = first;
        }
    }
    return true;
}

} // namespace detail

inline ExtensionOperator assemble_extension(const BandedGrid& band, int degree = 3) {
    if (degree != 3) throw ConfigError("only tri-cubic (degree 3) extension is implemented");
    ExtensionOperator op;
    const std::size_t n = band.size();
    op.columns_.resize(n);
    op.weights_.resize(n);
    std::ptrdiff_t bad = -1;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto st = cubic_stencil(band.spec(), band.closest(i).position);
        if (!detail::block_columns(band, st, op.columns_[i])) {
#pragma omp critical
            bad = i;
            continue;
        }
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < 4; ++k) op.weights_[i][4 * a + k] = st.weights[a][k];
        }
    }
    if (bad >= 0) {
        throw FootprintEscapesBand("interpolation footprint of band point " + std::to_string(bad) +
                                   " is not inside the band; increase the band radius");
    }
    return op;
}

/// Tri-cubic interpolation of band data at an arbitrary point near the
/// surface (used to read values back at mesh vertices).
inline double interpolate_at(const BandedGrid& band, std::span<const double> values, const Vec3& p) {
    const auto st = cubic_stencil(band.spec(), p);
    std::array<int32_t, 16> columns{};
    if (!detail::block_columns(band, st, columns)) {
        throw FootprintEscapesBand("interpolation footprint of the query point is not inside the band");
    }
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            for (int c = 0; c < 4; ++c) {
                acc += st.weights[0][a] * st.weights[1][b] * st.weights[2][c] * values[columns[4 * a + b] + c];
            }
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Axis differences and averages
// ---------------------------------------------------------------------------

enum class Difference { forward, backward, central };

/// Two-point differences along one axis. Points missing the required
/// neighbour get 0.
inline std::vector<double> axis_diff(const BandedGrid& band, std::span<const double> v, int axis,
                                     Difference variant) {
    const double inv_h = 1.0 / band.h();
    std::vector<double> out(band.size(), 0.0);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(band.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const int lo = band.neighbor(i, BandedGrid::minus(axis));
        const int hi = band.neighbor(i, BandedGrid::plus(axis));
        switch (variant) {
        case Difference::forward:
            if (hi >= 0) out[i] = (v[hi] - v[i]) * inv_h;
            break;
        case Difference::backward:
            if (lo >= 0) out[i] = (v[i] - v[lo]) * inv_h;
            break;
        case Difference::central:
            if (lo >= 0 && hi >= 0) out[i] = (v[hi] - v[lo]) * (0.5 * inv_h);
            break;
        }
    }
    return out;
}

/// Forward average (v_i + v_{i+e}) / 2, i.e. the value on the edge centre
/// between i and its plus-neighbour. Points without that neighbour get v_i.
inline std::vector<double> axis_avg_forward(const BandedGrid& band, std::span<const double> v, int axis) {
    std::vector<double> out(band.size());
    for (std::size_t i = 0; i < band.size(); ++i) {
        const int hi = band.neighbor(i, BandedGrid::plus(axis));
        out[i] = hi >= 0 ? 0.5 * (v[i] + v[hi]) : v[i];
    }
    return out;
}

/// Second-order discretization of div(G grad v):
///   sum_k  D-_k (A+_k G_kk .* D+_k v)
/// + sum_{k != l} Dc_k (G_kl .* Dc_l v)
/// evaluated at depth-2 band points (0 elsewhere). Off-diagonal entries use
/// the point values of G, diagonal entries are averaged onto edge centres.
inline void anisotropic_divergence(const BandedGrid& band, const TensorField& g, std::span<const double> v,
                                   std::span<double> out) {
    const double inv_h = 1.0 / band.h();
    const double inv_h2 = inv_h * inv_h;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(band.size());
    std::array<std::vector<double>, 3> central;
    for (int a = 0; a < 3; ++a) central[a] = axis_diff(band, v, a, Difference::central);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (band.depth(i) < 2) {
            out[i] = 0.0;
            continue;
        }
        const auto& nb = band.neighbors(i);
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
            const auto& gaa = g.comp[TensorField::index(a, a)];
            const int lo = nb[BandedGrid::minus(a)];
            const int hi = nb[BandedGrid::plus(a)];
            // Fluxes through the edge centres i+e/2 and i-e/2.
            const double flux_hi = 0.5 * (gaa[i] + gaa[hi]) * (v[hi] - v[i]);
            const double flux_lo = 0.5 * (gaa[lo] + gaa[i]) * (v[i] - v[lo]);
            acc += (flux_hi - flux_lo) * inv_h2;
            for (int b = 0; b < 3; ++b) {
                if (b == a) continue;
                const auto& gab = g.comp[TensorField::index(a, b)];
                acc += (gab[hi] * central[b][hi] - gab[lo] * central[b][lo]) * (0.5 * inv_h);
            }
        }
        out[i] = acc;
    }
}

inline std::vector<double> anisotropic_divergence(const BandedGrid& band, const TensorField& g,
                                                  std::span<const double> v) {
    std::vector<double> out(band.size());
    anisotropic_divergence(band, g, v, out);
    return out;
}

/// div(g grad v) for a scalar diffusivity: the diagonal part of the
/// anisotropic scheme with G = g I.
inline void isotropic_divergence(const BandedGrid& band, std::span<const double> g, std::span<const double> v,
                                 std::span<double> out) {
    const double inv_h2 = 1.0 / (band.h() * band.h());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(band.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (band.depth(i) < 2) {
            out[i] = 0.0;
            continue;
        }
        const auto& nb = band.neighbors(i);
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
            const int lo = nb[BandedGrid::minus(a)];
            const int hi = nb[BandedGrid::plus(a)];
            const double flux_hi = 0.5 * (g[i] + g[hi]) * (v[hi] - v[i]);
            const double flux_lo = 0.5 * (g[lo] + g[i]) * (v[i] - v[lo]);
            acc += (flux_hi - flux_lo) * inv_h2;
        }
        out[i] = acc;
    }
}

} // namespace cpsurf
