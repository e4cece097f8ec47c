#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <cpsurf/geometry.hpp>
#include <cpsurf/tangent.hpp>

#include "test_support.hpp"

using namespace cpsurf;

namespace {

constexpr double pi = std::numbers::pi;

// Dense parameter sampling of the torus, refined around the best sample.
double torus_brute_distance(const Vec3& x, double big, double small) {
    auto point = [&](double th, double ph) {
        return Vec3((big + small * std::cos(ph)) * std::cos(th), (big + small * std::cos(ph)) * std::sin(th),
                    small * std::sin(ph));
    };
    double best = 1e300, bt = 0, bp = 0;
    const int n = 720;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double th = 2 * pi * i / n, ph = 2 * pi * j / n;
            const double d = (point(th, ph) - x).norm();
            if (d < best) best = d, bt = th, bp = ph;
        }
    }
    double step = 2 * pi / n;
    for (int round = 0; round < 30; ++round) {
        for (int i = -2; i <= 2; ++i) {
            for (int j = -2; j <= 2; ++j) {
                const double d = (point(bt + i * step, bp + j * step) - x).norm();
                if (d < best) best = d, bt += i * step, bp += j * step;
            }
        }
        step *= 0.5;
    }
    return best;
}

} // namespace

TEST(CpSphere, RadialProjection) {
    const auto sp = cp_sphere(Vec3(2, 0, 0), 1.0);
    EXPECT_NEAR((sp.position - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(sp.distance, 1.0);
}

TEST(CpSphere, InsidePoint) {
    const auto sp = cp_sphere(Vec3(0.3, 0.4, 0), 1.0);
    EXPECT_NEAR((sp.position - Vec3(0.6, 0.8, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(sp.distance, 0.5, 1e-15);
    EXPECT_NEAR((sp.normal - Vec3(0.6, 0.8, 0)).norm(), 0.0, 1e-15);
}

TEST(CpSphere, CentreIsDegenerate) { EXPECT_THROW(cp_sphere(Vec3::Zero(), 1.0), DegenerateQuery); }

TEST(CpTorus, OuterEquator) {
    const auto sp = cp_torus(Vec3(1.5, 0, 0), 1.0, 0.4);
    EXPECT_NEAR((sp.position - Vec3(1.4, 0, 0)).norm(), 0.0, 1e-15);
}

TEST(CpTorus, AboveRing) {
    const auto sp = cp_torus(Vec3(1, 0, 1), 1.0, 0.4);
    EXPECT_NEAR((sp.position - Vec3(1, 0, 0.4)).norm(), 0.0, 1e-15);
}

TEST(CpTorus, SatisfiesImplicitEquation) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 1000; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        const auto p = cp_torus(x, 1.0, 0.4).position;
        const double lhs = std::pow(1.0 - std::hypot(p.x(), p.y()), 2) + p.z() * p.z();
        EXPECT_NEAR(lhs, 0.16, 1e-10);
    }
}

TEST(CpTorus, DegenerateOnAxisAndRing) {
    EXPECT_THROW(cp_torus(Vec3(0, 0, 0.3), 1.0, 0.4), DegenerateQuery);
    EXPECT_THROW(cp_torus(Vec3(0, 1, 0), 1.0, 0.4), DegenerateQuery);
}

TEST(CpTorus, MatchesParameterGridOracle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(0, 2 * pi), ph(0, 2 * pi), off(-0.08, 0.08);
    for (int k = 0; k < 20; ++k) {
        const double t = th(rng), p = ph(rng), o = off(rng);
        const Vec3 x((1.0 + (0.4 + o) * std::cos(p)) * std::cos(t), (1.0 + (0.4 + o) * std::cos(p)) * std::sin(t),
                     (0.4 + o) * std::sin(p));
        const auto sp = cp_torus(x, 1.0, 0.4);
        EXPECT_LE(sp.distance, torus_brute_distance(x, 1.0, 0.4) + 1e-6);
        EXPECT_NEAR((x - sp.position).norm(), sp.distance, 1e-12);
    }
}

TEST(CpRevolution, CylinderProjection) {
    const Profile cyl({Vec2(1, 0), Vec2(1, 1)});
    EXPECT_NEAR((cp_revolution(Vec3(2, 0, 0.5), cyl).position - Vec3(1, 0, 0.5)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((cp_revolution(Vec3(2, 0, 2), cyl).position - Vec3(1, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(CpRevolution, VaseMatchesParameterGridOracle) {
    const Profile vase(test::vase_profile());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(0, 2 * pi), s(0.0, 1.0), z(-0.6, 0.6);
    const auto& pts = vase.points();
    for (int k = 0; k < 50; ++k) {
        const double t = th(rng);
        const Vec3 x = Vec3(std::cos(t), std::sin(t), 0) * (0.3 + s(rng) * 0.6) + Vec3(0, 0, z(rng));
        const auto sp = cp_revolution(x, vase);
        // The nearest point of each parallel circle lies in the query's
        // meridian plane, so the 3D distance is the 2D distance to the profile.
        const Vec2 q(std::hypot(x.x(), x.y()), x.z());
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Vec2 e = pts[i + 1] - pts[i];
            const double t = std::clamp((q - pts[i]).dot(e) / e.squaredNorm(), 0.0, 1.0);
            best = std::min(best, (pts[i] + t * e - q).norm());
        }
        EXPECT_NEAR(sp.distance, best, 1e-12) << "query " << x.transpose();
        EXPECT_NEAR((x - sp.position).norm(), sp.distance, 1e-12);
    }
}

TEST(CpRevolution, ProfileValidation) {
    EXPECT_THROW(Profile({Vec2(1, 0)}), ConfigError);
    EXPECT_THROW(Profile({Vec2(-1, 0), Vec2(1, 1)}), ConfigError);
    EXPECT_THROW(Profile({Vec2(1, 0), Vec2(1, 0)}), ConfigError);
}

TEST(ClosestOnTriangle, InteriorProjection) {
    const auto hit = closest_on_triangle(Vec3(0.2, 0.2, 1), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
    EXPECT_NEAR((hit.point - Vec3(0.2, 0.2, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(hit.feature, TriangleFeature::face);
}

TEST(ClosestOnTriangle, HypotenuseMidpoint) {
    const auto hit = closest_on_triangle(Vec3(2, 2, 0), Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
    EXPECT_NEAR((hit.point - Vec3(0.5, 0.5, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(hit.feature, TriangleFeature::edge);
}

TEST(ClosestOnTriangle, MatchesDenseBarycentricSampling) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const Vec3 a(0.1, -0.2, 0.3), b(1.0, 0.2, -0.1), c(-0.3, 0.9, 0.2);
    for (int k = 0; k < 30; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        const auto hit = closest_on_triangle(x, a, b, c);
        double best = 1e300;
        const int n = 300;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; i + j <= n; ++j) {
                const Vec3 p = a + (b - a) * (double(i) / n) + (c - a) * (double(j) / n);
                best = std::min(best, (p - x).norm());
            }
        }
        EXPECT_LE((hit.point - x).norm(), best + 1e-12);
        EXPECT_GE((hit.point - x).norm(), best - 1e-2);
        const Vec3 rebuilt = hit.barycentric[0] * a + hit.barycentric[1] * b + hit.barycentric[2] * c;
        EXPECT_NEAR((rebuilt - hit.point).norm(), 0.0, 1e-12);
    }
}

TEST(CpMesh, IcosphereApproximatesSphere) {
    const MeshSurface mesh(make_icosphere(4));
    double edge = 0.0;
    const auto& m = mesh.mesh();
    for (const auto& f : m.faces) edge = std::max(edge, (m.vertices[f[0]] - m.vertices[f[1]]).norm());
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> r(0.8, 1.2);
    for (int k = 0; k < 100; ++k) {
        const Vec3 x = Vec3(g(rng), g(rng), g(rng)).normalized() * r(rng);
        const auto mp = cp_mesh(x, mesh);
        const auto sp = cp_sphere(x, 1.0);
        EXPECT_LT((mp.position - sp.position).norm(), edge * edge);
    }
}

TEST(CpMesh, BvhMatchesLinearScan) {
    const MeshSurface mesh(make_icosphere(2, 0.7));
    const auto& m = mesh.mesh();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int k = 0; k < 200; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        double best = 1e300;
        for (const auto& f : m.faces) {
            best = std::min(best, (closest_on_triangle(x, m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]).point - x).norm());
        }
        EXPECT_NEAR(mesh.closest(x).point.distance, best, 1e-14);
    }
}

TEST(CpMesh, NormalsPointOutward) {
    const MeshSurface mesh(make_icosphere(3));
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    for (int k = 0; k < 100; ++k) {
        const Vec3 x = Vec3(g(rng), g(rng), g(rng)).normalized() * 1.1;
        const auto sp = cp_mesh(x, mesh);
        EXPECT_NEAR(sp.normal.norm(), 1.0, 1e-12);
        EXPECT_GT(sp.normal.dot(x.normalized()), 0.9);
    }
}

TEST(CpMesh, RejectsBadMeshes) {
    EXPECT_THROW(MeshSurface(TriangleMesh{}), ConfigError);
    TriangleMesh bad;
    bad.vertices = {Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY()};
    bad.faces = {{0, 1, 5}};
    EXPECT_THROW(MeshSurface(std::move(bad)), ConfigError);
}

TEST(ClosestPointField, FactoriesValidate) {
    EXPECT_THROW(ClosestPointField::sphere(0.0), ConfigError);
    EXPECT_THROW(ClosestPointField::torus(0.4, 1.0), ConfigError);
    EXPECT_THROW(ClosestPointField::mesh(nullptr), ConfigError);
}

TEST(ClosestPointField, DistanceAgreesWithClosest) {
    const auto torus = ClosestPointField::torus(1.0, 0.4);
    const auto rev = ClosestPointField::revolution(Profile(test::vase_profile()));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.4, 1.4);
    for (int k = 0; k < 200; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        EXPECT_NEAR(torus.distance(x), torus.closest(x).distance, 1e-12);
        EXPECT_NEAR(rev.distance(x), rev.closest(x).distance, 1e-12);
    }
}

TEST(ClosestPointField, ClosestPointIsIdempotent) {
    for (const auto& cp : {ClosestPointField::sphere(1.0), ClosestPointField::torus(1.0, 0.4)}) {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(-1.4, 1.4);
        for (int k = 0; k < 200; ++k) {
            const Vec3 x(u(rng), u(rng), u(rng));
            const Vec3 p = cp.closest(x).position;
            EXPECT_NEAR((cp.closest(p).position - p).norm(), 0.0, 1e-12);
        }
    }
}

TEST(ClosestPointField, Parameters) {
    const auto sphere = ClosestPointField::sphere(1.0);
    const auto north = *sphere.parameters(Vec3(0, 0, 1));
    EXPECT_NEAR(north.y(), 0.0, 1e-15);
    const auto eq = *sphere.parameters(Vec3(1, 0, 0));
    EXPECT_NEAR(eq.x(), 0.5, 1e-15);
    EXPECT_NEAR(eq.y(), 0.5, 1e-15);
    const auto torus = ClosestPointField::torus(1.0, 0.4);
    const auto outer = *torus.parameters(Vec3(0, 1.4, 0));
    EXPECT_NEAR(outer.x(), 0.75, 1e-15);
    EXPECT_NEAR(outer.y(), 0.5, 1e-15);
    const auto mesh = ClosestPointField::mesh(std::make_shared<const MeshSurface>(make_icosphere(1)));
    EXPECT_FALSE(mesh.parameters(Vec3(0, 0, 1)).has_value());
}

TEST(ClosestPointField, BoundingBoxes) {
    const auto t = ClosestPointField::torus(1.0, 0.4).bounding_box();
    EXPECT_NEAR((t.max() - Vec3(1.4, 1.4, 0.4)).norm(), 0.0, 1e-15);
    const auto s = ClosestPointField::sphere(2.0).bounding_box();
    EXPECT_NEAR((s.min() - Vec3::Constant(-2.0)).norm(), 0.0, 1e-15);
}

// ---------------------------------------------------------------------------
// Tangent bases
// ---------------------------------------------------------------------------

TEST(Householder, AxisNormalX) {
    const auto q = tangent_basis_householder(Vec3(1, 0, 0));
    EXPECT_NEAR(std::abs(q.q1.dot(Vec3(0, 1, 0))), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(q.q2.dot(Vec3(0, 0, 1))), 1.0, 1e-15);
}

TEST(Householder, AxisNormalZ) {
    const auto q = tangent_basis_householder(Vec3(0, 0, 1));
    EXPECT_NEAR(q.q1.z(), 0.0, 1e-15);
    EXPECT_NEAR(q.q2.z(), 0.0, 1e-15);
}

TEST(Householder, DiagonalNormalOrthonormal) {
    const Vec3 n = Vec3(1, 1, 1).normalized();
    const auto q = tangent_basis_householder(n);
    EXPECT_NEAR(q.q1.dot(n), 0.0, 1e-12);
    EXPECT_NEAR(q.q2.dot(n), 0.0, 1e-12);
    EXPECT_NEAR(q.q1.dot(q.q2), 0.0, 1e-12);
    EXPECT_NEAR(q.q1.norm(), 1.0, 1e-12);
    EXPECT_NEAR(q.q2.norm(), 1.0, 1e-12);
}

TEST(Householder, RandomNormalsGiveProjector) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    for (int k = 0; k < 1000; ++k) {
        const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
        const Mat3 qq = tangent_basis_householder(n).matrix() * tangent_basis_householder(n).matrix().transpose();
        EXPECT_NEAR((qq - (Mat3::Identity() - n * n.transpose())).norm(), 0.0, 1e-14);
    }
}

TEST(Householder, RejectsNonUnit) { EXPECT_THROW(tangent_basis_householder(Vec3(0, 0, 1.1)), NotUnit); }

TEST(CpJacobian, SphereNorthPole) {
    const auto sphere = ClosestPointField::sphere(1.0);
    const auto f = cp_jacobian_frame(sphere, Vec3(0, 0, 1), 1e-3);
    EXPECT_NEAR(std::abs(f.normal.z()), 1.0, 1e-6);
    EXPECT_NEAR(f.basis.q1.z(), 0.0, 1e-6);
    EXPECT_NEAR(f.basis.q2.z(), 0.0, 1e-6);
}

TEST(CpJacobian, PlaneIsExact) {
    const auto plane = test::plane_surface(2.0);
    for (double hfd : {1e-3, 0.05, 0.2}) {
        const auto f = cp_jacobian_frame(plane, Vec3(0, 0, 0), hfd);
        EXPECT_NEAR(std::abs(f.normal.z()), 1.0, 1e-12);
        EXPECT_NEAR(f.basis.q1.z(), 0.0, 1e-12);
        EXPECT_NEAR(f.basis.q2.z(), 0.0, 1e-12);
        EXPECT_NEAR(f.eigenvalues[0], 0.0, 1e-12);
        EXPECT_NEAR(f.eigenvalues[1], 1.0, 1e-12);
        EXPECT_NEAR(f.eigenvalues[2], 1.0, 1e-12);
    }
}

TEST(CpJacobian, TorusTangentsSecondOrder) {
    const auto torus = ClosestPointField::torus(1.0, 0.4);
    const double th = 0.7, ph = 2.1;
    const Vec3 x((1 + 0.4 * std::cos(ph)) * std::cos(th), (1 + 0.4 * std::cos(ph)) * std::sin(th), 0.4 * std::sin(ph));
    const Vec3 n(std::cos(ph) * std::cos(th), std::cos(ph) * std::sin(th), std::sin(ph));
    const Mat3 p = Mat3::Identity() - n * n.transpose();
    auto err = [&](double hfd) {
        const auto q = cp_jacobian_frame(torus, x, hfd).basis.matrix();
        return (q * q.transpose() - p).norm();
    };
    const double e1 = err(0.04), e2 = err(0.02);
    EXPECT_LT(e1, 0.05);
    EXPECT_LT(e2, e1 / 3.0 + 1e-13);
}

TEST(CpJacobian, ConsistentWithHouseholderProjector) {
    const auto torus = ClosestPointField::torus(1.0, 0.4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t(0, 2 * pi);
    for (int k = 0; k < 50; ++k) {
        const double th = t(rng), ph = t(rng);
        const Vec3 p((1 + 0.4 * std::cos(ph)) * std::cos(th), (1 + 0.4 * std::cos(ph)) * std::sin(th), 0.4 * std::sin(ph));
        const auto f = cp_jacobian_frame(torus, p, 0.0125);
        const Vec3 n = torus.closest(p).normal;
        const Mat3 qq = f.basis.matrix() * f.basis.matrix().transpose();
        EXPECT_NEAR((qq - (Mat3::Identity() - n * n.transpose())).norm(), 0.0, 1e-3);
    }
}
