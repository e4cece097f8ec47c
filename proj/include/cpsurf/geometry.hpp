#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace cpsurf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Box3 = Eigen::AlignedBox3d;

// A closest point query result. `distance` is the unsigned distance from the
// query to `position`.
struct SurfacePoint {
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    double distance = 0.0;
};

// ---------------------------------------------------------------------------
// Analytic surfaces
// ---------------------------------------------------------------------------

inline constexpr double degenerate_tolerance = 1e-12;

/// Unit-normal radial projection onto the sphere of the given radius centred
/// at the origin. Throws DegenerateQuery at the centre.
inline SurfacePoint cp_sphere(const Vec3& x, double radius) {
    const double len = x.norm();
    if (len < degenerate_tolerance) {
        throw DegenerateQuery("cp_sphere: query at the sphere centre");
    }
    SurfacePoint sp;
    sp.normal = x / len;
    sp.position = radius * sp.normal;
    sp.distance = std::abs(len - radius);
    return sp;
}

/// Closest point on the torus (R - sqrt(x^2 + y^2))^2 + z^2 = r^2.
/// The query is first projected onto the ring of centres, then pushed out
/// to the tube surface. Throws DegenerateQuery on the z-axis and on the ring.
inline SurfacePoint cp_torus(const Vec3& x, double big_radius, double small_radius) {
    const double rho = std::hypot(x.x(), x.y());
    if (rho < degenerate_tolerance) {
        throw DegenerateQuery("cp_torus: query on the symmetry axis");
    }
    const Vec3 ring(big_radius * x.x() / rho, big_radius * x.y() / rho, 0.0);
    const Vec3 d = x - ring;
    const double len = d.norm();
    if (len < degenerate_tolerance) {
        throw DegenerateQuery("cp_torus: query on the ring of tube centres");
    }
    SurfacePoint sp;
    sp.normal = d / len;
    sp.position = ring + small_radius * sp.normal;
    sp.distance = std::abs(len - small_radius);
    return sp;
}

/// Generating curve of a surface of revolution about the z-axis, as a
/// polyline of (s, z) samples with s >= 0.
class Profile {
public:
    Profile() = default;

    explicit Profile(std::vector<Vec2> points) : points_(std::move(points)) {
        if (points_.size() < 2) {
            throw ConfigError("revolution profile needs at least 2 vertices");
        }
        for (const auto& p : points_) {
            if (!(p.x() >= 0.0) || !std::isfinite(p.y())) {
                throw ConfigError("revolution profile vertices need s >= 0 and finite z");
            }
        }
        arclength_.assign(points_.size(), 0.0);
        for (std::size_t i = 1; i < points_.size(); ++i) {
            const double seg = (points_[i] - points_[i - 1]).norm();
            if (seg <= 0.0) {
                throw ConfigError("revolution profile has repeated consecutive vertices");
            }
            arclength_[i] = arclength_[i - 1] + seg;
        }
    }

    const std::vector<Vec2>& points() const { return points_; }
    double length() const { return arclength_.back(); }

    struct Hit {
        Vec2 point;
        Vec2 normal;       // unit, right-hand normal of the curve direction
        double arclength;  // from the first vertex
        double distance;
    };

    /// Closest point on the polyline to q = (s, z).
    Hit closest(const Vec2& q) const {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_seg = 0;
        double best_t = 0.0;
        for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
            const Vec2 a = points_[i];
            const Vec2 ab = points_[i + 1] - a;
            double t = (q - a).dot(ab) / ab.squaredNorm();
            t = std::clamp(t, 0.0, 1.0);
            const double d2 = (a + t * ab - q).squaredNorm();
            if (d2 < best) {
                best = d2;
                best_seg = i;
                best_t = t;
            }
        }
        Hit hit;
        const Vec2 a = points_[best_seg];
        const Vec2 ab = points_[best_seg + 1] - a;
        hit.point = a + best_t * ab;
        hit.distance = std::sqrt(best);
        hit.arclength = arclength_[best_seg] + best_t * ab.norm();
        // Interior vertices use the bisector of the adjacent segment normals.
        if (best_t == 0.0 && best_seg > 0) {
            hit.normal = (segment_normal(best_seg - 1) + segment_normal(best_seg)).normalized();
        } else if (best_t == 1.0 && best_seg + 2 < points_.size()) {
            hit.normal = (segment_normal(best_seg) + segment_normal(best_seg + 1)).normalized();
        } else {
            hit.normal = segment_normal(best_seg);
        }
        return hit;
    }

    Box3 bounding_box() const {
        double smax = 0.0, zmin = points_.front().y(), zmax = zmin;
        for (const auto& p : points_) {
            smax = std::max(smax, p.x());
            zmin = std::min(zmin, p.y());
            zmax = std::max(zmax, p.y());
        }
        return Box3(Vec3(-smax, -smax, zmin), Vec3(smax, smax, zmax));
    }

private:
    Vec2 segment_normal(std::size_t i) const {
        const Vec2 d = (points_[i + 1] - points_[i]).normalized();
        return Vec2(d.y(), -d.x());
    }

    std::vector<Vec2> points_;
    std::vector<double> arclength_;
};

/// Closest point on the surface obtained by revolving `profile` about the
/// z-axis. Queries beyond the profile ends land on the end circles.
inline SurfacePoint cp_revolution(const Vec3& x, const Profile& profile) {
    const double rho = std::hypot(x.x(), x.y());
    const auto hit = profile.closest(Vec2(rho, x.z()));
    double c = 1.0, s = 0.0;
    if (rho < degenerate_tolerance) {
        if (hit.point.x() > degenerate_tolerance) {
            throw DegenerateQuery("cp_revolution: query on the axis, closest circle not unique");
        }
    } else {
        c = x.x() / rho;
        s = x.y() / rho;
    }
    SurfacePoint sp;
    sp.position = Vec3(hit.point.x() * c, hit.point.x() * s, hit.point.y());
    sp.normal = Vec3(hit.normal.x() * c, hit.normal.x() * s, hit.normal.y());
    sp.distance = hit.distance;
    return sp;
}

// ---------------------------------------------------------------------------
// Triangle meshes
// ---------------------------------------------------------------------------

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<Vec3> colors;  // optional, one RGB triple in [0,1] per vertex

    bool has_colors() const { return !colors.empty() && colors.size() == vertices.size(); }
};

/// Icosahedron refined `subdivisions` times and projected onto the sphere.
/// Faces are wound counter-clockwise seen from outside.
inline TriangleMesh make_icosphere(int subdivisions, double radius = 1.0) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh mesh;
    mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
                     {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                  {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (auto& v : mesh.vertices) v = v.normalized();
    for (int level = 0; level < subdivisions; ++level) {
        std::vector<std::array<int, 3>> refined;
        refined.reserve(mesh.faces.size() * 4);
        std::vector<std::vector<std::pair<int, int>>> by_vertex(mesh.vertices.size());
        auto midpoint = [&](int a, int b) {
            const auto [lo, hi] = std::minmax(a, b);
            if (static_cast<std::size_t>(lo) >= by_vertex.size()) by_vertex.resize(lo + 1);
            for (const auto& [other, idx] : by_vertex[lo]) {
                if (other == hi) return idx;
            }
            mesh.vertices.push_back((mesh.vertices[lo] + mesh.vertices[hi]).normalized());
            const int idx = static_cast<int>(mesh.vertices.size()) - 1;
            by_vertex[lo].push_back({hi, idx});
            return idx;
        };
        for (const auto& f : mesh.faces) {
            const int a = midpoint(f[0], f[1]);
            const int b = midpoint(f[1], f[2]);
            const int c = midpoint(f[2], f[0]);
            refined.push_back({f[0], a, c});
            refined.push_back({f[1], b, a});
            refined.push_back({f[2], c, b});
            refined.push_back({a, b, c});
        }
        mesh.faces = std::move(refined);
    }
    for (auto& v : mesh.vertices) v *= radius;
    return mesh;
}

/// Where on a triangle a closest point query landed.
enum class TriangleFeature { face, edge, vertex };

struct TriangleHit {
    Vec3 point;
    Vec3 barycentric;  // weights of the three corners
    TriangleFeature feature = TriangleFeature::face;
    int local_index = 0;  // corner for vertex hits, edge (i -> i+1) for edge hits
};

/// Exact closest point on triangle (a, b, c) using Voronoi region tests.
inline TriangleHit closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return {a, {1, 0, 0}, TriangleFeature::vertex, 0};

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return {b, {0, 1, 0}, TriangleFeature::vertex, 1};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return {a + v * ab, {1 - v, v, 0}, TriangleFeature::edge, 0};
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return {c, {0, 0, 1}, TriangleFeature::vertex, 2};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return {a + w * ac, {1 - w, 0, w}, TriangleFeature::edge, 2};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {b + w * (c - b), {0, 1 - w, w}, TriangleFeature::edge, 1};
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return {a + ab * v + ac * w, {1 - v - w, v, w}, TriangleFeature::face, 0};
}

/// Closest point structure over a triangle mesh: bounding volume hierarchy
/// with exact per-triangle tests, plus pseudo-normals for edges and
/// vertices so that normals are continuous across features.
class MeshSurface {
public:
    struct Hit {
        SurfacePoint point;
        int face = -1;
        Vec3 barycentric = Vec3::Zero();
    };

    explicit MeshSurface(TriangleMesh mesh) : mesh_(std::move(mesh)) {
        if (mesh_.faces.empty() || mesh_.vertices.empty()) {
            throw ConfigError("mesh surface: empty mesh");
        }
        const int nv = static_cast<int>(mesh_.vertices.size());
        for (const auto& f : mesh_.faces) {
            for (int k : f) {
                if (k < 0 || k >= nv) throw ConfigError("mesh surface: face index out of range");
            }
        }
        compute_normals();
        build_bvh();
    }

    const TriangleMesh& mesh() const { return mesh_; }
    Box3 bounding_box() const { return nodes_.front().box; }

    Hit closest(const Vec3& x) const {
        Hit best;
        double best_d2 = std::numeric_limits<double>::infinity();
        TriangleHit best_tri{};
        std::array<int, 64> stack{};
        int top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes_[stack[--top]];
            if (node.box.squaredExteriorDistance(x) >= best_d2) continue;
            if (node.count > 0) {
                for (int k = node.first; k < node.first + node.count; ++k) {
                    const int f = order_[k];
                    const auto& tri = mesh_.faces[f];
                    const auto hit = closest_on_triangle(x, mesh_.vertices[tri[0]], mesh_.vertices[tri[1]],
                                                         mesh_.vertices[tri[2]]);
                    const double d2 = (hit.point - x).squaredNorm();
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best.face = f;
                        best_tri = hit;
                    }
                }
            } else {
                const Node& l = nodes_[node.left];
                const Node& r = nodes_[node.left + 1];
                const double dl = l.box.squaredExteriorDistance(x);
                const double dr = r.box.squaredExteriorDistance(x);
                // Push the farther child first so the nearer one is visited next.
                if (dl < dr) {
                    stack[top++] = node.left + 1;
                    stack[top++] = node.left;
                } else {
                    stack[top++] = node.left;
                    stack[top++] = node.left + 1;
                }
            }
        }
        best.barycentric = best_tri.barycentric;
        best.point.position = best_tri.point;
        best.point.distance = std::sqrt(best_d2);
        const auto& tri = mesh_.faces[best.face];
        switch (best_tri.feature) {
        case TriangleFeature::face:
            best.point.normal = face_normals_[best.face];
            break;
        case TriangleFeature::vertex:
            best.point.normal = vertex_normals_[tri[best_tri.local_index]];
            break;
        case TriangleFeature::edge:
            best.point.normal = edge_normals_[3 * best.face + best_tri.local_index];
            break;
        }
        return best;
    }

private:
    struct Node {
        Box3 box;
        int left = -1;   // index of left child; right child is left + 1
        int first = 0;   // leaf range into order_
        int count = 0;   // > 0 for leaves
    };

    void compute_normals() {
        const std::size_t nf = mesh_.faces.size();
        face_normals_.resize(nf);
        vertex_normals_.assign(mesh_.vertices.size(), Vec3::Zero());
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& t = mesh_.faces[f];
            const Vec3 n = (mesh_.vertices[t[1]] - mesh_.vertices[t[0]])
                               .cross(mesh_.vertices[t[2]] - mesh_.vertices[t[0]]);
            face_normals_[f] = n.norm() > 0.0 ? n.normalized() : Vec3::UnitZ();
            for (int k = 0; k < 3; ++k) {
                const Vec3 e1 = (mesh_.vertices[t[(k + 1) % 3]] - mesh_.vertices[t[k]]).normalized();
                const Vec3 e2 = (mesh_.vertices[t[(k + 2) % 3]] - mesh_.vertices[t[k]]).normalized();
                const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
                vertex_normals_[t[k]] += angle * face_normals_[f];
            }
        }
        for (auto& n : vertex_normals_) {
            n = n.norm() > 0.0 ? n.normalized() : Vec3::UnitZ();
        }
        // Edge pseudo-normals: sum of the incident face normals.
        std::vector<std::vector<std::pair<int, int>>> incident(mesh_.vertices.size());
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& t = mesh_.faces[f];
            for (int k = 0; k < 3; ++k) {
                const auto [lo, hi] = std::minmax(t[k], t[(k + 1) % 3]);
                incident[lo].push_back({hi, static_cast<int>(f)});
            }
        }
        edge_normals_.resize(3 * nf);
        for (std::size_t f = 0; f < nf; ++f) {
            const auto& t = mesh_.faces[f];
            for (int k = 0; k < 3; ++k) {
                const auto [lo, hi] = std::minmax(t[k], t[(k + 1) % 3]);
                Vec3 sum = Vec3::Zero();
                for (const auto& [other, face] : incident[lo]) {
                    if (other == hi) sum += face_normals_[face];
                }
                edge_normals_[3 * f + k] = sum.norm() > 0.0 ? sum.normalized() : face_normals_[f];
            }
        }
    }

    void build_bvh() {
        const int nf = static_cast<int>(mesh_.faces.size());
        order_.resize(nf);
        centroids_.resize(nf);
        for (int f = 0; f < nf; ++f) {
            order_[f] = f;
            const auto& t = mesh_.faces[f];
            centroids_[f] = (mesh_.vertices[t[0]] + mesh_.vertices[t[1]] + mesh_.vertices[t[2]]) / 3.0;
        }
        nodes_.reserve(2 * nf);
        nodes_.push_back({});
        build_node(0, 0, nf);
        centroids_.clear();
        centroids_.shrink_to_fit();
    }

    void build_node(int node_index, int first, int count) {
        Box3 box;
        box.setEmpty();
        Box3 centroid_box;
        centroid_box.setEmpty();
        for (int k = first; k < first + count; ++k) {
            const auto& t = mesh_.faces[order_[k]];
            for (int c = 0; c < 3; ++c) box.extend(mesh_.vertices[t[c]]);
            centroid_box.extend(centroids_[order_[k]]);
        }
        nodes_[node_index].box = box;
        if (count <= 4) {
            nodes_[node_index].first = first;
            nodes_[node_index].count = count;
            return;
        }
        int axis = 0;
        centroid_box.sizes().maxCoeff(&axis);
        const int mid = first + count / 2;
        std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                         [&](int a, int b) { return centroids_[a][axis] < centroids_[b][axis]; });
        const int left = static_cast<int>(nodes_.size());
        nodes_.push_back({});
        nodes_.push_back({});
        nodes_[node_index].left = left;
        build_node(left, first, mid - first);
        build_node(left + 1, mid, first + count - mid);
    }

    TriangleMesh mesh_;
    std::vector<Vec3> face_normals_;
    std::vector<Vec3> vertex_normals_;
    std::vector<Vec3> edge_normals_;  // 3 per face, edge k joins corners k and k+1
    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Vec3> centroids_;
};

inline SurfacePoint cp_mesh(const Vec3& x, const MeshSurface& mesh) { return mesh.closest(x).point; }

// ---------------------------------------------------------------------------
// ClosestPointField: the closest point representation of one surface
// ---------------------------------------------------------------------------

struct SphereSurface {
    double radius = 1.0;
};

struct TorusSurface {
    double big_radius = 1.0;
    double small_radius = 0.4;
};

struct RevolutionSurface {
    Profile profile;
};

class ClosestPointField {
public:
    enum class Kind { sphere, torus, revolution, mesh };

    static ClosestPointField sphere(double radius) {
        if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
        return ClosestPointField(SphereSurface{radius});
    }
    static ClosestPointField torus(double big_radius, double small_radius) {
        if (!(small_radius > 0.0) || !(big_radius > small_radius)) {
            throw ConfigError("torus radii must satisfy R > r > 0");
        }
        return ClosestPointField(TorusSurface{big_radius, small_radius});
    }
    static ClosestPointField revolution(Profile profile) {
        return ClosestPointField(RevolutionSurface{std::move(profile)});
    }
    static ClosestPointField mesh(std::shared_ptr<const MeshSurface> mesh) {
        if (!mesh) throw ConfigError("mesh surface handle is null");
        return ClosestPointField(std::move(mesh));
    }

    Kind kind() const { return static_cast<Kind>(surface_.index()); }

    SurfacePoint closest(const Vec3& x) const {
        return std::visit(
            [&](const auto& s) -> SurfacePoint {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, SphereSurface>) {
                    return cp_sphere(x, s.radius);
                } else if constexpr (std::is_same_v<S, TorusSurface>) {
                    return cp_torus(x, s.big_radius, s.small_radius);
                } else if constexpr (std::is_same_v<S, RevolutionSurface>) {
                    return cp_revolution(x, s.profile);
                } else {
                    return s->closest(x).point;
                }
            },
            surface_);
    }

    /// Unsigned distance to the surface. Defined everywhere, including the
    /// medial locations where `closest` throws.
    double distance(const Vec3& x) const {
        return std::visit(
            [&](const auto& s) -> double {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, SphereSurface>) {
                    return std::abs(x.norm() - s.radius);
                } else if constexpr (std::is_same_v<S, TorusSurface>) {
                    const double rho = std::hypot(x.x(), x.y());
                    return std::abs(std::hypot(rho - s.big_radius, x.z()) - s.small_radius);
                } else if constexpr (std::is_same_v<S, RevolutionSurface>) {
                    return s.profile.closest(Vec2(std::hypot(x.x(), x.y()), x.z())).distance;
                } else {
                    return s->closest(x).point.distance;
                }
            },
            surface_);
    }

    Box3 bounding_box() const {
        return std::visit(
            [&](const auto& s) -> Box3 {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, SphereSurface>) {
                    return Box3(Vec3::Constant(-s.radius), Vec3::Constant(s.radius));
                } else if constexpr (std::is_same_v<S, TorusSurface>) {
                    const double a = s.big_radius + s.small_radius;
                    return Box3(Vec3(-a, -a, -s.small_radius), Vec3(a, a, s.small_radius));
                } else if constexpr (std::is_same_v<S, RevolutionSurface>) {
                    return s.profile.bounding_box();
                } else {
                    return s->bounding_box();
                }
            },
            surface_);
    }

    /// Texture coordinates in [0,1]^2 of an on-surface point, for surfaces
    /// with a declared parameterization:
    ///   sphere      (longitude, colatitude)
    ///   torus       (major angle, minor angle)
    ///   revolution  (angle, profile arclength)
    std::optional<Vec2> parameters(const Vec3& p) const {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        auto angle01 = [&](double a) { return (a + std::numbers::pi) / two_pi; };
        return std::visit(
            [&](const auto& s) -> std::optional<Vec2> {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, SphereSurface>) {
                    const double z = std::clamp(p.z() / p.norm(), -1.0, 1.0);
                    return Vec2(angle01(std::atan2(p.y(), p.x())), std::acos(z) / std::numbers::pi);
                } else if constexpr (std::is_same_v<S, TorusSurface>) {
                    const double rho = std::hypot(p.x(), p.y());
                    return Vec2(angle01(std::atan2(p.y(), p.x())),
                                angle01(std::atan2(p.z(), rho - s.big_radius)));
                } else if constexpr (std::is_same_v<S, RevolutionSurface>) {
                    const double rho = std::hypot(p.x(), p.y());
                    const auto hit = s.profile.closest(Vec2(rho, p.z()));
                    return Vec2(angle01(std::atan2(p.y(), p.x())), hit.arclength / s.profile.length());
                } else {
                    return std::nullopt;
                }
            },
            surface_);
    }

    /// The mesh behind a mesh surface, or null.
    const MeshSurface* mesh_surface() const {
        if (const auto* m = std::get_if<std::shared_ptr<const MeshSurface>>(&surface_)) return m->get();
        return nullptr;
    }

    std::string describe() const {
        switch (kind()) {
        case Kind::sphere: return "sphere";
        case Kind::torus: return "torus";
        case Kind::revolution: return "revolution";
        case Kind::mesh: return "mesh";
        }
        return "unknown";
    }

private:
    using Variant =
        std::variant<SphereSurface, TorusSurface, RevolutionSurface, std::shared_ptr<const MeshSurface>>;

    explicit ClosestPointField(Variant v) : surface_(std::move(v)) {}

    Variant surface_;
};

} // namespace cpsurf
