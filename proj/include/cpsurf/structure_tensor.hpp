#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "discretization.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "operators.hpp"

namespace cpsurf {

// ---------------------------------------------------------------------------
// Heat solves and surface gradients
// ---------------------------------------------------------------------------

/// Surface heat equation up to time t by the Ruuth-Merriman iteration
///   w = v + tau L v,   v <- E w
/// with the step shortened so that the steps add up to exactly t.
inline std::vector<double> heat_smooth(const Discretization& d, std::span<const double> v, double t) {
    std::vector<double> state(v.begin(), v.end());
    const int steps = step_count(t, d.tau_nominal());
    if (steps == 0) return state;
    const double tau = t / steps;
    std::vector<double> lap(state.size());
    for (int s = 0; s < steps; ++s) {
        d.laplacian.apply(state, lap);
        for (std::size_t i = 0; i < state.size(); ++i) lap[i] = state[i] + tau * lap[i];
        d.extension.apply(lap, state);
    }
    return state;
}

inline SurfaceField heat_smooth(const Discretization& d, const SurfaceField& v, double t) {
    SurfaceField out(v.size(), v.channels());
    for (int c = 0; c < v.channels(); ++c) {
        const auto smoothed = heat_smooth(d, v.channel(c), t);
        std::copy(smoothed.begin(), smoothed.end(), out.channel(c).begin());
    }
    out.extended = true;
    return out;
}

/// Gradient of an extended field by central differences, re-extended per
/// component. On the surface this is the surface gradient.
inline std::array<std::vector<double>, 3> surface_gradient(const Discretization& d, std::span<const double> v) {
    std::array<std::vector<double>, 3> grad;
    for (int a = 0; a < 3; ++a) {
        const auto raw = axis_diff(d.band, v, a, Difference::central);
        grad[a] = d.extend(raw);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Structure tensor
// ---------------------------------------------------------------------------

/// J_{sigma,rho}[u] averaged over channels: per channel pre-smooth to sigma,
/// form grad u_sigma grad u_sigma^T, then heat-smooth each component to rho.
/// The channel mean is taken before the rho smoothing; both are linear, so
/// the order does not matter.
inline TensorField build_structure_tensor(const Discretization& d, const SurfaceField& u, double sigma, double rho) {
    if (sigma < 0.0 || rho < 0.0) throw ConfigError("structure tensor times must be non-negative");
    const std::size_t n = d.size();
    TensorField j(n);
    const double weight = 1.0 / u.channels();
    for (int c = 0; c < u.channels(); ++c) {
        const auto smoothed = heat_smooth(d, u.channel(c), sigma);
        const auto grad = surface_gradient(d, smoothed);
        for (int r = 0; r < 3; ++r) {
            for (int s = r; s < 3; ++s) {
                auto& comp = j.comp[TensorField::index(r, s)];
                for (std::size_t i = 0; i < n; ++i) comp[i] += weight * grad[r][i] * grad[s][i];
            }
        }
    }
    if (rho > 0.0) {
        for (auto& comp : j.comp) comp = heat_smooth(d, comp, rho);
    }
    return j;
}

/// Spectral data of a contracted (tangent-plane) 2x2 structure tensor.
/// omega is the unit eigenvector of the smaller eigenvalue (the edge
/// direction), omega_perp the one of the larger.
struct Eigen2 {
    double mu1 = 0.0;
    double mu2 = 0.0;
    Vec2 omega_perp = Vec2::UnitX();
    Vec2 omega = Vec2::UnitY();

    double coherence() const { return mu1 - mu2; }
};

/// Closed-form eigendecomposition of [[a, b], [b, d]].
inline Eigen2 decompose_symmetric_2x2(double a, double b, double d) {
    Eigen2 e;
    const double mean = 0.5 * (a + d);
    const double half_diff = 0.5 * (a - d);
    const double radius = std::hypot(half_diff, b);
    e.mu1 = mean + radius;
    e.mu2 = mean - radius;
    const double theta = 0.5 * std::atan2(b, half_diff);
    e.omega_perp = Vec2(std::cos(theta), std::sin(theta));
    e.omega = Vec2(-e.omega_perp.y(), e.omega_perp.x());
    return e;
}

/// J~ = Q^T J Q followed by its spectral decomposition.
inline Eigen2 contract_and_decompose(const Mat3& j, const TangentBasis& q) {
    const Vec3 jq1 = j * q.q1;
    const Vec3 jq2 = j * q.q2;
    const double a = q.q1.dot(jq1);
    const double b = 0.5 * (q.q1.dot(jq2) + q.q2.dot(jq1));
    const double d = q.q2.dot(jq2);
    return decompose_symmetric_2x2(a, b, d);
}

inline std::vector<Eigen2> contract_and_decompose(const TensorField& j, std::span<const TangentBasis> q) {
    std::vector<Eigen2> out(j.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(j.size()); ++i) {
        out[i] = contract_and_decompose(j.at(i), q[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Diffusivities
// ---------------------------------------------------------------------------

/// Perona-Malik diffusivity g(s^2) = 1 / (1 + s^2 / lambda^2).
inline double perona_malik_diffusivity(double s2, double lambda) { return 1.0 / (1.0 + s2 / (lambda * lambda)); }

struct Kappa {
    double across = 1.0;  // kappa1, along omega_perp
    double along = 1.0;   // kappa2, along omega
};

/// Edge-enhancing eigenvalues: kappa1 = g evaluated with s = c, kappa2 = 1.
/// Negative round-off in mu is clamped before use.
inline Kappa kappa_edge_enhancing(double mu1, double mu2, double lambda) {
    const double m1 = std::max(mu1, 0.0);
    const double m2 = std::clamp(mu2, 0.0, m1);
    const double c = m1 - m2;
    return {perona_malik_diffusivity(c * c, lambda), 1.0};
}

/// Coherence-enhancing eigenvalues: kappa1 = alpha,
/// kappa2 = alpha + (1 - alpha) exp(-B^2 / c^2), with kappa2 = alpha at c = 0.
inline Kappa kappa_coherence_enhancing(double mu1, double mu2, double alpha, double b) {
    const double m1 = std::max(mu1, 0.0);
    const double m2 = std::clamp(mu2, 0.0, m1);
    const double c = m1 - m2;
    if (c <= 0.0) return {alpha, alpha};
    return {alpha, alpha + (1.0 - alpha) * std::exp(-(b * b) / (c * c))};
}

enum class KappaMode { edge_enhancing, coherence_enhancing };

/// Absolute diffusivity parameters. `degenerate_coherence` is the coherence
/// below which the edge-enhancing tensor is forced to the tangential
/// identity (the eigenvectors are ill-conditioned there).
struct KappaParams {
    KappaMode mode = KappaMode::edge_enhancing;
    double lambda = 1.0;
    double alpha = 1e-3;
    double b = 1.0;
    double degenerate_coherence = 0.0;

    void validate() const {
        if (mode == KappaMode::edge_enhancing && !(lambda > 0.0)) throw ConfigError("lambda must be positive");
        if (mode == KappaMode::coherence_enhancing) {
            if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)");
            if (!(b > 0.0)) throw ConfigError("B must be positive");
        }
    }
};

inline Kappa kappa(const KappaParams& p, const Eigen2& e) {
    if (p.mode == KappaMode::edge_enhancing) {
        if (e.coherence() < p.degenerate_coherence) return {1.0, 1.0};
        return kappa_edge_enhancing(e.mu1, e.mu2, p.lambda);
    }
    return kappa_coherence_enhancing(e.mu1, e.mu2, p.alpha, p.b);
}

/// G = Q (kappa1 w~perp w~perp^T + kappa2 w~ w~^T) Q^T, or kappa Q Q^T when
/// both eigenvalues agree.
inline Mat3 expand_diffusion_tensor(const TangentBasis& q, const Eigen2& e, const Kappa& k) {
    if (k.across == k.along) {
        return k.along * (q.q1 * q.q1.transpose() + q.q2 * q.q2.transpose());
    }
    const Vec3 w_perp = e.omega_perp.x() * q.q1 + e.omega_perp.y() * q.q2;
    const Vec3 w = e.omega.x() * q.q1 + e.omega.y() * q.q2;
    return k.across * (w_perp * w_perp.transpose()) + k.along * (w * w.transpose());
}

/// Diffusion tensor field with the per-point spectral data it was built from.
struct DiffusionTensor {
    TensorField g;
    std::vector<double> mu1, mu2, kappa1, kappa2;

    double max_coherence() const {
        double m = 0.0;
        for (std::size_t i = 0; i < mu1.size(); ++i) m = std::max(m, mu1[i] - mu2[i]);
        return m;
    }
};

/// Construction of G[u]: structure tensor, contraction onto the tangent
/// plane, eigendecomposition, diffusivities, expansion back to 3x3. J is a
/// closest point extension and the frames are evaluated at cp(x_i), so G is
/// G o cp without a further extension step.
inline DiffusionTensor build_diffusion_tensor(const Discretization& d, const SurfaceField& u,
                                              const KappaParams& params, double sigma, double rho) {
    params.validate();
    if (!u.all_finite()) throw NonFiniteState("build_diffusion_tensor: non-finite input values");
    const TensorField j = build_structure_tensor(d, u, sigma, rho);
    const std::size_t n = d.size();
    DiffusionTensor out;
    out.g = TensorField(n);
    out.mu1.resize(n);
    out.mu2.resize(n);
    out.kappa1.resize(n);
    out.kappa2.resize(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        const auto e = contract_and_decompose(j.at(i), d.tangents[i]);
        const auto k = kappa(params, e);
        out.g.set(i, expand_diffusion_tensor(d.tangents[i], e, k));
        out.mu1[i] = e.mu1;
        out.mu2[i] = e.mu2;
        out.kappa1[i] = k.across;
        out.kappa2[i] = k.along;
    }
    return out;
}

/// Per-point coherence mu1 - mu2 of the contracted structure tensor.
inline std::vector<double> coherence_field(const Discretization& d, const SurfaceField& u, double sigma, double rho) {
    const TensorField j = build_structure_tensor(d, u, sigma, rho);
    const auto eig = contract_and_decompose(j, d.tangents);
    std::vector<double> c(eig.size());
    for (std::size_t i = 0; i < eig.size(); ++i) c[i] = std::max(eig[i].coherence(), 0.0);
    return c;
}

} // namespace cpsurf
