#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "band.hpp"
#include "geometry.hpp"
#include "operators.hpp"
#include "tangent.hpp"

namespace cpsurf {

enum class TangentMethod { householder, cp_jacobian };

/// Number of explicit steps needed to reach time t with steps no larger than
/// tau_nominal. Exact multiples are not rounded up by representation error.
inline int step_count(double t, double tau_nominal) {
    if (!(t > 0.0)) return 0;
    const double q = t / tau_nominal;
    return std::max(1, static_cast<int>(std::ceil(q * (1.0 - 1e-12))));
}

/// Everything that depends only on the surface and the grid: the band, the
/// Laplacian, the extension operator and a tangent frame at the closest
/// point of every band point. Built once per run and shared read-only.
struct Discretization {
    BandedGrid band;
    SparseOperator laplacian;
    ExtensionOperator extension;
    std::vector<TangentBasis> tangents;
    std::vector<Vec3> normals;  // unit normal at cp(x_i), consistent with `tangents`
    double tau_factor = 0.15;

    double h() const { return band.h(); }
    std::size_t size() const { return band.size(); }
    double tau_nominal() const { return tau_factor * h() * h(); }

    std::vector<double> extend(std::span<const double> w) const { return extension.apply(w); }
};

inline std::vector<TangentBasis> compute_tangents(const BandedGrid& band, const ClosestPointField& cp,
                                                  TangentMethod method, std::vector<Vec3>& normals) {
    std::vector<TangentBasis> tangents(band.size());
    normals.resize(band.size());
    std::string failure;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(band.size()); ++i) {
        const auto& sp = band.closest(i);
        try {
            if (method == TangentMethod::householder) {
                tangents[i] = tangent_basis_householder(sp.normal);
                normals[i] = sp.normal;
            } else {
                const auto frame = cp_jacobian_frame(cp, sp.position, band.h());
                tangents[i] = frame.basis;
                normals[i] = frame.normal;
            }
        } catch (const Error& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) {
        if (method == TangentMethod::cp_jacobian) throw IllConditioned(failure);
        throw NotUnit(failure);
    }
    return tangents;
}

inline Discretization build_discretization(BandedGrid band, const ClosestPointField& cp, TangentMethod method,
                                           double tau_factor = 0.15) {
    if (!(tau_factor > 0.0 && tau_factor <= 0.5)) {
        throw ConfigError("time step factor must lie in (0, 0.5]");
    }
    Discretization d;
    d.band = std::move(band);
    d.laplacian = assemble_laplacian(d.band);
    d.extension = assemble_extension(d.band, 3);
    d.tangents = compute_tangents(d.band, cp, method, d.normals);
    d.tau_factor = tau_factor;
    return d;
}

inline Discretization build_discretization(const ClosestPointField& cp, const GridSpec& spec,
                                           TangentMethod method, double tau_factor = 0.15) {
    return build_discretization(build_band(cp, spec, compute_band_radius(3, 1, spec.h)), cp, method, tau_factor);
}

} // namespace cpsurf
