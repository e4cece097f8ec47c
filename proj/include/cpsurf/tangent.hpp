#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "geometry.hpp"

namespace cpsurf {

/// Orthonormal pair spanning the tangent plane at a surface point.
struct TangentBasis {
    Vec3 q1 = Vec3::UnitX();
    Vec3 q2 = Vec3::UnitY();

    Eigen::Matrix<double, 3, 2> matrix() const {
        Eigen::Matrix<double, 3, 2> q;
        q.col(0) = q1;
        q.col(1) = q2;
        return q;
    }
};

/// Tangent basis from a single Householder reflection H = I - 2 v v^T / v^T v
/// that maps n to -+e1. The last two columns of H are orthonormal and
/// orthogonal to n.
inline TangentBasis tangent_basis_householder(const Vec3& n) {
    const double len = n.norm();
    if (std::abs(len - 1.0) > 1e-8) {
        throw NotUnit("tangent_basis_householder: |n| = " + std::to_string(len));
    }
    // Sign choice avoids cancellation in v = n + sign(n1) e1.
    const double sign = n.x() >= 0.0 ? 1.0 : -1.0;
    Vec3 v = n;
    v.x() += sign * len;
    const double scale = 2.0 / v.squaredNorm();
    TangentBasis basis;
    basis.q1 = Vec3::UnitY() - scale * v.y() * v;
    basis.q2 = Vec3::UnitZ() - scale * v.z() * v;
    return basis;
}

/// Eigen-frame of the symmetrized closest point Jacobian at a surface point.
/// At surface points Dcp = I - n n^T, so the eigenvalue near 0 belongs to the
/// normal and the two eigenvalues near 1 span the tangent plane.
struct CpJacobianFrame {
    TangentBasis basis;
    Vec3 normal;
    Vec3 eigenvalues;  // ascending
};

inline CpJacobianFrame cp_jacobian_frame(const ClosestPointField& cp, const Vec3& x, double h_fd) {
    Mat3 jac;
    for (int k = 0; k < 3; ++k) {
        const Vec3 e = h_fd * Vec3::Unit(k);
        jac.col(k) = (cp.closest(x + e).position - cp.closest(x - e).position) / (2.0 * h_fd);
    }
    const Mat3 sym = 0.5 * (jac + jac.transpose());
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(sym);
    const Vec3 ev = eig.eigenvalues();
    constexpr double cluster = 0.2;
    if (std::abs(ev[0]) > cluster || std::abs(ev[1] - 1.0) > cluster || std::abs(ev[2] - 1.0) > cluster) {
        throw IllConditioned("cp Jacobian eigenvalues (" + std::to_string(ev[0]) + ", " +
                             std::to_string(ev[1]) + ", " + std::to_string(ev[2]) +
                             ") do not cluster as {0, 1, 1}");
    }
    CpJacobianFrame frame;
    frame.normal = eig.eigenvectors().col(0);
    frame.basis.q1 = eig.eigenvectors().col(1);
    frame.basis.q2 = eig.eigenvectors().col(2);
    frame.eigenvalues = ev;
    return frame;
}

inline TangentBasis tangent_basis_from_cp_jacobian(const ClosestPointField& cp, const Vec3& x, double h_fd) {
    return cp_jacobian_frame(cp, x, h_fd).basis;
}

} // namespace cpsurf
