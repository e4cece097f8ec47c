#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "band.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "mesh_io.hpp"
#include "operators.hpp"
#include "structure_tensor.hpp"

namespace cpsurf {

// ---------------------------------------------------------------------------
// Textures and mesh colors
// ---------------------------------------------------------------------------

/// How a texture is laid onto a sphere. `native` uses the surface's own
/// parameterization; `hemispheres` projects the image orthographically
/// along z onto both the upper and the lower hemisphere.
enum class TextureProjection { native, hemispheres };

inline TextureProjection texture_projection_from_string(const std::string& s) {
    if (s == "native" || s.empty()) return TextureProjection::native;
    if (s == "hemispheres") return TextureProjection::hemispheres;
    throw ConfigError("unknown texture projection '" + s + "'");
}

/// Samples `img` at the texture coordinates of every band point's closest
/// point. The result is a closest point extension by construction.
inline SurfaceField texture_to_surface(const RasterImage& img, const ClosestPointField& cp, const BandedGrid& band,
                                       TextureProjection projection = TextureProjection::native) {
    if (cp.kind() == ClosestPointField::Kind::mesh) {
        throw UnparameterizedSurface("mesh surfaces have no texture parameterization; use vertex colors");
    }
    if (projection == TextureProjection::hemispheres && cp.kind() != ClosestPointField::Kind::sphere) {
        throw ConfigError("hemisphere projection is only defined for spheres");
    }
    SurfaceField out(band.size(), img.channels());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(band.size()); ++i) {
        const Vec3& p = band.closest(i).position;
        if (projection == TextureProjection::hemispheres) {
            const Vec3 q = p.normalized();
            const double u = 0.5 * (q.x() + 1.0), v = 0.5 * (1.0 - q.y());
            for (int c = 0; c < img.channels(); ++c) out(i, c) = img.sample_clamped(u, v, c);
        } else {
            const Vec2 uv = *cp.parameters(p);
            for (int c = 0; c < img.channels(); ++c) out(i, c) = img.sample(uv.x(), uv.y(), c);
        }
    }
    out.extended = true;
    return out;
}

/// Barycentric interpolation of per-vertex colors at the closest triangle
/// of every band point. Three channels.
inline SurfaceField mesh_colors_to_surface(const MeshSurface& mesh, const BandedGrid& band) {
    if (!mesh.mesh().has_colors()) throw MissingColors("mesh has no per-vertex colors");
    const auto& m = mesh.mesh();
    SurfaceField out(band.size(), 3);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(band.size()); ++i) {
        const auto hit = mesh.closest(band.position(i));
        const auto& f = m.faces[hit.face];
        const Vec3 color = hit.barycentric[0] * m.colors[f[0]] + hit.barycentric[1] * m.colors[f[1]] +
                           hit.barycentric[2] * m.colors[f[2]];
        for (int c = 0; c < 3; ++c) out(i, c) = color[c];
    }
    out.extended = true;
    return out;
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

enum class NoiseModel { none, gaussian_additive, salt_pepper, random_color_replacement };

inline NoiseModel noise_model_from_string(const std::string& s) {
    if (s == "none" || s.empty()) return NoiseModel::none;
    if (s == "gaussian_additive") return NoiseModel::gaussian_additive;
    if (s == "salt_pepper") return NoiseModel::salt_pepper;
    if (s == "random_color_replacement") return NoiseModel::random_color_replacement;
    throw ConfigError("unknown noise model '" + s + "'");
}

/// `strength` is the standard deviation for gaussian_additive and the
/// fraction of band points hit for the other models. Palette entries have
/// one value per channel or a single value used for all channels; an empty
/// palette means {black, white}.
struct NoiseSpec {
    NoiseModel model = NoiseModel::none;
    double strength = 0.0;
    uint64_t seed = 1;
    std::vector<std::vector<double>> palette;

    void validate() const {
        if (model == NoiseModel::gaussian_additive && !(strength >= 0.0)) {
            throw ConfigError("noise.strength must be >= 0");
        }
        if ((model == NoiseModel::salt_pepper || model == NoiseModel::random_color_replacement) &&
            !(strength >= 0.0 && strength <= 1.0)) {
            throw ConfigError("noise.strength must lie in [0, 1] for fraction-based models");
        }
        for (const auto& p : palette) {
            if (p.empty()) throw ConfigError("noise.palette entries must not be empty");
        }
    }
};

/// Applies `spec` point by point in band order, drawing from Random(seed):
///   gaussian_additive: every point and channel gets strength * normal()
///   salt_pepper:       uniform() < strength selects the point, then
///                      uniform() < 0.5 sets all channels to 0, else to 1
///   replacement:       uniform() < strength selects the point, then
///                      index(palette size) picks its color
/// and re-extends the result. `affected`, when given, receives a 0/1 flag
/// per band point.
inline SurfaceField add_noise(const SurfaceField& u, const NoiseSpec& spec, const ExtensionOperator& extension,
                              std::vector<uint8_t>* affected = nullptr) {
    spec.validate();
    if (affected) affected->assign(u.size(), 0);
    if (spec.model == NoiseModel::none || spec.strength == 0.0) return u;
    std::vector<std::vector<double>> palette = spec.palette;
    if (palette.empty()) palette = {{0.0}, {1.0}};
    for (const auto& p : palette) {
        if (p.size() != 1 && static_cast<int>(p.size()) != u.channels()) {
            throw ConfigError("noise.palette entries need 1 or " + std::to_string(u.channels()) + " values");
        }
    }
    SurfaceField out = u;
    Random rng(spec.seed);
    for (std::size_t i = 0; i < u.size(); ++i) {
        switch (spec.model) {
        case NoiseModel::gaussian_additive:
            for (int c = 0; c < u.channels(); ++c) out(i, c) += spec.strength * rng.normal();
            if (affected) (*affected)[i] = 1;
            break;
        case NoiseModel::salt_pepper:
            if (rng.uniform() < spec.strength) {
                const double value = rng.uniform() < 0.5 ? 0.0 : 1.0;
                for (int c = 0; c < u.channels(); ++c) out(i, c) = value;
                if (affected) (*affected)[i] = 1;
            }
            break;
        case NoiseModel::random_color_replacement:
            if (rng.uniform() < spec.strength) {
                const auto& color = palette[rng.index(palette.size())];
                for (int c = 0; c < u.channels(); ++c) out(i, c) = color[color.size() == 1 ? 0 : c];
                if (affected) (*affected)[i] = 1;
            }
            break;
        case NoiseModel::none: break;
        }
    }
    SurfaceField extended(u.size(), u.channels());
    for (int c = 0; c < u.channels(); ++c) extension.apply(out.channel(c), extended.channel(c));
    extended.extended = true;
    return extended;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline Vec3 field_color(const SurfaceField& f, std::size_t i) {
    if (f.channels() == 1) return Vec3::Constant(f(i, 0));
    return Vec3(f(i, 0), f(i, 1), f(i, 2));
}

/// Colored point cloud of the surface: one vertex per grid cell containing
/// a closest point (the lowest band index wins), colored by the field value
/// of that band point.
inline TriangleMesh surface_point_cloud(const SurfaceField& field, const BandedGrid& band) {
    if (field.size() != band.size()) throw ConfigError("field size does not match the band");
    TriangleMesh cloud;
    std::unordered_set<int64_t> seen;
    const auto& spec = band.spec();
    for (std::size_t i = 0; i < band.size(); ++i) {
        const Vec3& p = band.closest(i).position;
        int64_t key = 0;
        for (int a = 0; a < 3; ++a) {
            const auto cell = static_cast<int64_t>(std::floor((p[a] - spec.origin[a]) / spec.h));
            key = key * 1000003 + cell;
        }
        if (!seen.insert(key).second) continue;
        cloud.vertices.push_back(p);
        cloud.colors.push_back(field_color(field, i));
    }
    return cloud;
}

inline void export_surface(const SurfaceField& field, const BandedGrid& band, const std::string& path) {
    write_ply(path, surface_point_cloud(field, band));
}

/// Copy of `mesh` with vertex colors read back from the band by tri-cubic
/// interpolation at every vertex.
inline TriangleMesh mesh_with_field_colors(const TriangleMesh& mesh, const SurfaceField& field,
                                           const BandedGrid& band) {
    TriangleMesh out = mesh;
    out.colors.assign(mesh.vertices.size(), Vec3::Zero());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        for (int c = 0; c < 3; ++c) {
            const int ch = field.channels() == 1 ? 0 : c;
            out.colors[v][c] = interpolate_at(band, field.channel(ch), mesh.vertices[v]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// 10 log10(1 / MSE) over all band points and channels, values clamped to
/// [0, 1]. Identical inputs give +infinity.
inline double psnr(const SurfaceField& u, const SurfaceField& reference) {
    if (u.size() != reference.size() || u.channels() != reference.channels()) {
        throw ConfigError("psnr: fields differ in size or channel count");
    }
    double sum = 0.0;
    const auto& a = u.data();
    const auto& b = reference.data();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::clamp(a[k], 0.0, 1.0) - std::clamp(b[k], 0.0, 1.0);
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

/// PSNR between the vertex colors of two meshes with the same vertex count.
inline double psnr(const TriangleMesh& a, const TriangleMesh& b) {
    if (!a.has_colors() || !b.has_colors()) throw MissingColors("psnr: both meshes need vertex colors");
    if (a.vertices.size() != b.vertices.size()) throw ConfigError("psnr: meshes differ in vertex count");
    SurfaceField fa(a.vertices.size(), 3), fb(b.vertices.size(), 3);
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            fa(i, c) = a.colors[i][c];
            fb(i, c) = b.colors[i][c];
        }
    }
    return psnr(fa, fb);
}

/// Per band point: position, mu1, mu2, coherence, kappa1, kappa2.
inline void write_tensor_csv(std::ostream& out, const BandedGrid& band, const DiffusionTensor& t) {
    out << "x,y,z,mu1,mu2,coherence,kappa1,kappa2\n";
    out.precision(9);
    for (std::size_t i = 0; i < band.size(); ++i) {
        const Vec3 p = band.position(i);
        out << p.x() << ',' << p.y() << ',' << p.z() << ',' << t.mu1[i] << ',' << t.mu2[i] << ','
            << t.mu1[i] - t.mu2[i] << ',' << t.kappa1[i] << ',' << t.kappa2[i] << '\n';
    }
}

} // namespace cpsurf
