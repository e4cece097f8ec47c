#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

#include <cpsurf/cpsurf.hpp>

#include "test_support.hpp"

using namespace cpsurf;

namespace {

constexpr double pi = std::numbers::pi;

SurfaceField scalar_field(const Discretization& d, double (*f)(const Vec3&)) {
    return SurfaceField::scalar(test::sample(d, f));
}

double max_normal_leak(const Discretization& d, const TensorField& g) {
    double leak = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) leak = std::max(leak, (g.at(i) * d.normals[i]).norm());
    return leak;
}

bool interior_plane_point(const Discretization& d, std::size_t i, double half) {
    const Vec3& p = d.band.closest(i).position;
    return std::abs(p.x()) < half && std::abs(p.y()) < half;
}

} // namespace

TEST(Eigen2x2, DiagonalCase) {
    const auto e = decompose_symmetric_2x2(2.0, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(e.mu1, 2.0);
    EXPECT_DOUBLE_EQ(e.mu2, 1.0);
    EXPECT_NEAR(std::abs(e.omega.y()), 1.0, 1e-15);
    EXPECT_NEAR(e.omega.x(), 0.0, 1e-15);
}

TEST(Eigen2x2, RankOneCase) {
    const auto e = decompose_symmetric_2x2(1.0, 1.0, 1.0);
    EXPECT_NEAR(e.mu1, 2.0, 1e-15);
    EXPECT_NEAR(e.mu2, 0.0, 1e-15);
    EXPECT_NEAR(std::abs(e.omega.dot(Vec2(1, -1).normalized())), 1.0, 1e-15);
}

TEST(Eigen2x2, RandomMatricesAgainstEigenSolver) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = u(rng), b = u(rng), d = u(rng);
        const auto e = decompose_symmetric_2x2(a, b, d);
        Eigen::Matrix2d m;
        m << a, b, b, d;
        const Eigen::Matrix2d rebuilt =
            e.mu1 * e.omega_perp * e.omega_perp.transpose() + e.mu2 * e.omega * e.omega.transpose();
        EXPECT_LT((rebuilt - m).norm(), 1e-12 * std::max(1.0, m.norm()));
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> oracle(m);
        EXPECT_NEAR(e.mu1, oracle.eigenvalues()[1], 1e-12 * std::max(1.0, m.norm()));
        EXPECT_NEAR(e.mu2, oracle.eigenvalues()[0], 1e-12 * std::max(1.0, m.norm()));
        EXPECT_GE(e.mu1, e.mu2);
        EXPECT_NEAR(std::abs(e.omega.dot(oracle.eigenvectors().col(0))), 1.0, 1e-9);
    }
}

TEST(Kappa, EdgeEnhancing) {
    EXPECT_DOUBLE_EQ(kappa_edge_enhancing(0.0, 0.0, 0.3).across, 1.0);
    EXPECT_DOUBLE_EQ(kappa_edge_enhancing(1.5, 1.0, 0.5).across, 0.5);
    EXPECT_DOUBLE_EQ(kappa_edge_enhancing(1.5, 1.0, 0.5).along, 1.0);
    EXPECT_LT(kappa_edge_enhancing(100.0, 0.0, 0.5).across, 1e-4);
}

TEST(Kappa, CoherenceEnhancing) {
    const double alpha = 1e-3;
    const auto zero = kappa_coherence_enhancing(1.0, 1.0, alpha, 1.0);
    EXPECT_DOUBLE_EQ(zero.along, alpha);
    EXPECT_DOUBLE_EQ(zero.across, alpha);
    EXPECT_NEAR(kappa_coherence_enhancing(1e6, 0.0, alpha, 1.0).along, 1.0, 1e-9);
    const auto mid = kappa_coherence_enhancing(2.0, 1.0, alpha, 1.0);
    EXPECT_NEAR(mid.along, alpha + (1 - alpha) * std::exp(-1.0), 1e-15);
}

TEST(Kappa, ParamsValidate) {
    KappaParams p;
    p.lambda = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p.mode = KappaMode::coherence_enhancing;
    p.alpha = 1.0;
    EXPECT_THROW(p.validate(), ConfigError);
}

TEST(ExpandTensor, TangentialAndSpectral) {
    const auto q = tangent_basis_householder(Vec3(1, 2, 2) / 3.0);
    const auto e = decompose_symmetric_2x2(3.0, 1.0, 1.0);
    const Mat3 g = expand_diffusion_tensor(q, e, {0.2, 0.9});
    const Vec3 wp = e.omega_perp.x() * q.q1 + e.omega_perp.y() * q.q2;
    const Vec3 w = e.omega.x() * q.q1 + e.omega.y() * q.q2;
    EXPECT_NEAR((g * (Vec3(1, 2, 2) / 3.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((g * wp - 0.2 * wp).norm(), 0.0, 1e-15);
    EXPECT_NEAR((g * w - 0.9 * w).norm(), 0.0, 1e-15);
}

TEST(HeatSmooth, ZeroTimeIsIdentity) {
    const auto& d = test::sphere_disc(0.05);
    const auto v = test::sample(d, [](const Vec3& p) { return p.x() * p.y(); });
    EXPECT_EQ(heat_smooth(d, v, 0.0), v);
}

TEST(HeatSmooth, ConstantsUnchanged) {
    const auto& d = test::torus_disc(0.05);
    const std::vector<double> c(d.size(), 0.42);
    for (double x : heat_smooth(d, c, 0.01)) ASSERT_NEAR(x, 0.42, 1e-12);
}

TEST(HeatSmooth, SphereEigenfunctionDecay) {
    const auto& d = test::sphere_disc(0.05);
    const auto v = test::sample(d, [](const Vec3& p) { return p.z(); });
    const auto s = heat_smooth(d, v, 0.05);
    double err = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) err = std::max(err, std::abs(s[i] - std::exp(-0.1) * v[i]));
    EXPECT_LT(err / std::exp(-0.1), 0.02);
}

TEST(SurfaceGradient, ConstantGivesZero) {
    const auto& d = test::sphere_disc(0.05);
    const std::vector<double> c(d.size(), 2.0);
    for (const auto& comp : surface_gradient(d, c)) {
        for (double x : comp) ASSERT_EQ(x, 0.0);
    }
}

TEST(SurfaceGradient, LinearOnPlane) {
    const auto& d = test::plane_disc(0.05);
    const auto v = test::sample(d, [](const Vec3& p) { return p.x(); });
    const auto g = surface_gradient(d, v);
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!interior_plane_point(d, i, 0.8)) continue;
        ASSERT_NEAR(g[0][i], 1.0, 1e-12);
        ASSERT_NEAR(g[1][i], 0.0, 1e-12);
        ASSERT_NEAR(g[2][i], 0.0, 1e-12);
    }
}

TEST(SurfaceGradient, SphereHeightFunctionSecondOrder) {
    double err[2];
    int k = 0;
    for (double h : {0.05, 0.025}) {
        const auto& d = test::sphere_disc(h);
        const auto v = test::sample(d, [](const Vec3& p) { return p.z(); });
        const auto g = surface_gradient(d, v);
        double e = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Vec3 x = d.band.closest(i).position;
            const Vec3 exact = Vec3::UnitZ() - x.z() * x;
            e = std::max(e, (Vec3(g[0][i], g[1][i], g[2][i]) - exact).norm());
        }
        err[k++] = e;
    }
    EXPECT_LT(err[0], 0.01);
    EXPECT_GT(std::log2(err[0] / err[1]), 1.7);
}

TEST(StructureTensor, ConstantGivesZero) {
    const auto& d = test::sphere_disc(0.05);
    const SurfaceField u(d.size(), 1, 0.5);
    const auto j = build_structure_tensor(d, u, 1e-4, 4e-4);
    for (const auto& comp : j.comp) {
        for (double x : comp) ASSERT_NEAR(x, 0.0, 1e-20);
    }
}

TEST(StructureTensor, RankOneWithoutIntegration) {
    const auto& d = test::torus_disc(0.05);
    const auto u = scalar_field(d, [](const Vec3& p) { return std::sin(3 * p.x()) + p.z(); });
    const auto j = build_structure_tensor(d, u, 1e-3, 0.0);
    const auto eig = contract_and_decompose(j, d.tangents);
    for (const auto& e : eig) ASSERT_NEAR(e.mu2, 0.0, 1e-8 * std::max(1.0, e.mu1));
}

TEST(StructureTensor, ChannelMeanOfTensors) {
    const auto& d = test::sphere_disc(0.05);
    SurfaceField rgb(d.size(), 3);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3 p = d.band.closest(i).position;
        rgb(i, 0) = p.x();
        rgb(i, 1) = p.y() * p.z();
        rgb(i, 2) = std::sin(2 * p.z());
    }
    const auto j = build_structure_tensor(d, rgb, 1e-4, 4e-4);
    TensorField mean(d.size());
    for (int c = 0; c < 3; ++c) {
        SurfaceField one(d.size(), 1);
        std::copy(rgb.channel(c).begin(), rgb.channel(c).end(), one.channel(0).begin());
        const auto jc = build_structure_tensor(d, one, 1e-4, 4e-4);
        for (int k = 0; k < 6; ++k) {
            for (std::size_t i = 0; i < d.size(); ++i) mean.comp[k][i] += jc.comp[k][i] / 3.0;
        }
    }
    for (int k = 0; k < 6; ++k) {
        for (std::size_t i = 0; i < d.size(); ++i) ASSERT_NEAR(j.comp[k][i], mean.comp[k][i], 1e-12);
    }
}

TEST(StructureTensor, StripesOnPlaneOrientEdgeVector) {
    const auto& d = test::plane_disc(0.025);
    const auto u = scalar_field(d, [](const Vec3& p) { return std::sin(4 * pi * p.x()); });
    const auto j = build_structure_tensor(d, u, 1e-5, 1e-3);
    const auto eig = contract_and_decompose(j, d.tangents);
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!interior_plane_point(d, i, 0.6)) continue;
        const Vec3 w = eig[i].omega.x() * d.tangents[i].q1 + eig[i].omega.y() * d.tangents[i].q2;
        worst = std::max(worst, std::acos(std::min(1.0, std::abs(w.y()))) * 180.0 / pi);
    }
    EXPECT_LT(worst, 1.0);
}

TEST(DiffusionTensor, ConstantInputGivesTangentialProjector) {
    const auto& d = test::torus_disc(0.05);
    const SurfaceField u(d.size(), 1, 0.3);
    KappaParams ee;
    ee.lambda = 0.1;
    const auto g = build_diffusion_tensor(d, u, ee, 1e-4, 4e-4);
    KappaParams ce;
    ce.mode = KappaMode::coherence_enhancing;
    ce.alpha = 1e-3;
    ce.b = 1.0;
    const auto gc = build_diffusion_tensor(d, u, ce, 1e-4, 4e-4);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3 n = d.normals[i];
        const Mat3 p = Mat3::Identity() - n * n.transpose();
        ASSERT_NEAR((g.g.at(i) - p).norm(), 0.0, 1e-14);
        ASSERT_NEAR((gc.g.at(i) - 1e-3 * p).norm(), 0.0, 1e-14);
    }
}

TEST(DiffusionTensor, StepEdgeOnPlane) {
    const auto& d = test::plane_disc(0.025);
    const auto u = scalar_field(d, [](const Vec3& p) { return p.x() > 0.01 ? 1.0 : 0.0; });
    KappaParams ee;
    const auto c = coherence_field(d, u, 1e-4, 4e-4);
    ee.lambda = 0.04 * *std::max_element(c.begin(), c.end());
    const auto t = build_diffusion_tensor(d, u, ee, 1e-4, 4e-4);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3& p = d.band.closest(i).position;
        if (std::abs(p.x() - 0.01) > 0.02 || std::abs(p.y()) > 0.6) continue;
        const Mat3 g = t.g.at(i);
        EXPECT_NEAR((g * Vec3::UnitY() - Vec3::UnitY()).norm(), 0.0, 1e-9);
        EXPECT_LT(Vec3::UnitX().dot(g * Vec3::UnitX()), 0.05);
        ++checked;
    }
    EXPECT_GT(checked, 10u);
}

TEST(DiffusionTensor, TangentialOnSphereAndTorus) {
    for (const Discretization* d : {&test::sphere_disc(0.05), &test::torus_disc(0.05)}) {
        const auto u = scalar_field(*d, [](const Vec3& p) { return std::sin(5 * p.x()) * std::cos(3 * p.y()) + p.z(); });
        KappaParams ee;
        ee.lambda = 0.05;
        EXPECT_LT(max_normal_leak(*d, build_diffusion_tensor(*d, u, ee, 1e-4, 4e-4).g), 1e-8);
        KappaParams ce;
        ce.mode = KappaMode::coherence_enhancing;
        ce.b = 0.01;
        EXPECT_LT(max_normal_leak(*d, build_diffusion_tensor(*d, u, ce, 1e-4, 4e-4).g), 1e-8);
    }
}

TEST(DiffusionTensor, RotationEquivariance) {
    const auto& d = test::sphere_disc(0.05);
    auto f = [](const Vec3& p) { return std::sin(3 * p.x()) + p.y() * p.z(); };
    std::vector<double> a(d.size()), b(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Vec3 p = d.band.closest(i).position;
        a[i] = f(p);
        b[i] = f(Vec3(p.y(), -p.x(), p.z()));
    }
    const auto ca = coherence_field(d, SurfaceField::scalar(a), 1e-4, 4e-4);
    const auto cb = coherence_field(d, SurfaceField::scalar(b), 1e-4, 4e-4);
    const auto spec = d.band.spec();
    for (std::size_t i = 0; i < d.size(); i += 7) {
        const Vec3 x = d.band.position(i);
        const Vec3 rx(-x.y(), x.x(), x.z());
        GridIndex g;
        for (int k = 0; k < 3; ++k) g[k] = static_cast<int>(std::lround((rx[k] - spec.origin[k]) / spec.h));
        const int j = d.band.index_of(g);
        ASSERT_GE(j, 0);
        ASSERT_NEAR(cb[j], ca[i], 1e-9 * std::max(1.0, ca[i]));
    }
}

TEST(DiffusionTensor, NonFiniteInputIsRejected) {
    const auto& d = test::sphere_disc(0.05);
    SurfaceField u(d.size(), 1, 0.5);
    u(3) = std::nan("");
    KappaParams ee;
    EXPECT_THROW(build_diffusion_tensor(d, u, ee, 1e-4, 4e-4), NonFiniteState);
}
