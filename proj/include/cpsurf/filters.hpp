#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "discretization.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "structure_tensor.hpp"

namespace cpsurf {

enum class FilterKind { gaussian, perona_malik, edge_enhancing, coherence_enhancing };

inline std::string to_string(FilterKind k) {
    switch (k) {
    case FilterKind::gaussian: return "gaussian";
    case FilterKind::perona_malik: return "perona_malik";
    case FilterKind::edge_enhancing: return "edge_enhancing";
    case FilterKind::coherence_enhancing: return "coherence_enhancing";
    }
    return "unknown";
}

inline FilterKind filter_kind_from_string(const std::string& s) {
    if (s == "gaussian") return FilterKind::gaussian;
    if (s == "perona_malik") return FilterKind::perona_malik;
    if (s == "edge_enhancing") return FilterKind::edge_enhancing;
    if (s == "coherence_enhancing") return FilterKind::coherence_enhancing;
    throw ConfigError("unknown filter kind '" + s + "'");
}

/// Filter parameters. Times (sigma, rho, stop_time) are in the units of the
/// surface embedding; lambda_rel and b_rel are relative to the data (see
/// adapt_parameters).
struct FilterConfig {
    FilterKind kind = FilterKind::edge_enhancing;
    double sigma = 0.0;
    double rho = 0.0;
    double lambda_rel = 0.04;
    double alpha = 1e-3;
    double b_rel = 1e-3;
    double stop_time = 0.0;
    int g_refresh = 1;
    std::optional<int> steps;  // overrides stop_time: run exactly this many nominal steps

    void validate() const {
        if (!(stop_time >= 0.0)) throw ConfigError("filter.stop_time must be >= 0");
        if (!(sigma >= 0.0)) throw ConfigError("filter.sigma must be >= 0");
        if (!(rho >= 0.0)) throw ConfigError("filter.rho must be >= 0");
        if (g_refresh < 1) throw ConfigError("filter.g_refresh must be >= 1");
        if (steps && *steps < 0) throw ConfigError("filter.steps must be >= 0");
        if ((kind == FilterKind::perona_malik || kind == FilterKind::edge_enhancing) && !(lambda_rel > 0.0)) {
            throw ConfigError("filter.lambda_rel must be > 0");
        }
        if (kind == FilterKind::coherence_enhancing) {
            if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("filter.alpha must lie in [0, 1)");
            if (!(b_rel > 0.0)) throw ConfigError("filter.b_rel must be > 0");
        }
    }
};

/// Number of steps and the step size actually used for a run.
struct TimeGrid {
    int steps = 0;
    double tau = 0.0;
};

inline TimeGrid time_grid(const FilterConfig& config, double tau_nominal) {
    if (config.steps) return {*config.steps, tau_nominal};
    const int n = step_count(config.stop_time, tau_nominal);
    return {n, n > 0 ? config.stop_time / n : tau_nominal};
}

// ---------------------------------------------------------------------------
// Parameter adaption
// ---------------------------------------------------------------------------

/// Data-relative thresholds made absolute:
///   lambda            = lambda_rel ||grad u0_sigma||_inf   (Perona-Malik)
///   lambda_coherence  = lambda_rel ||c0||_inf              (edge-enhancing)
///   b                 = b_rel ||c0||_inf                   (coherence-enhancing)
struct AdaptedParams {
    double lambda = 0.0;
    double lambda_coherence = 0.0;
    double b = 0.0;
    double max_coherence = 0.0;
    double max_gradient = 0.0;
};

/// |grad u_sigma|^2 averaged over channels (the trace of J_{sigma,0}).
inline std::vector<double> gradient_magnitude_squared(const Discretization& d, const SurfaceField& u, double sigma) {
    std::vector<double> s2(d.size(), 0.0);
    const double weight = 1.0 / u.channels();
    for (int c = 0; c < u.channels(); ++c) {
        const auto smoothed = heat_smooth(d, u.channel(c), sigma);
        const auto grad = surface_gradient(d, smoothed);
        for (std::size_t i = 0; i < s2.size(); ++i) {
            s2[i] += weight * (grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i] + grad[2][i] * grad[2][i]);
        }
    }
    return s2;
}

inline AdaptedParams adapt_parameters(const Discretization& d, const SurfaceField& u0, const FilterConfig& config) {
    AdaptedParams p;
    const auto s2 = gradient_magnitude_squared(d, u0, config.sigma);
    p.max_gradient = std::sqrt(*std::max_element(s2.begin(), s2.end()));
    if (!(p.max_gradient >= 1e-14)) {
        throw ConstantInput("initial data is constant (max smoothed gradient " + std::to_string(p.max_gradient) + ")");
    }
    p.lambda = config.lambda_rel * p.max_gradient;
    if (config.kind == FilterKind::edge_enhancing || config.kind == FilterKind::coherence_enhancing) {
        const auto c = coherence_field(d, u0, config.sigma, config.rho);
        p.max_coherence = *std::max_element(c.begin(), c.end());
        p.lambda_coherence = config.lambda_rel * p.max_coherence;
        p.b = config.b_rel * p.max_coherence;
    }
    return p;
}

/// Threshold below which the edge-enhancing tensor is forced to identity,
/// relative to the initial maximal coherence.
inline constexpr double degenerate_coherence_fraction = 1e-3;

inline KappaParams kappa_params(const FilterConfig& config, const AdaptedParams& adapted) {
    KappaParams k;
    if (config.kind == FilterKind::coherence_enhancing) {
        k.mode = KappaMode::coherence_enhancing;
        k.alpha = config.alpha;
        k.b = adapted.b;
    } else {
        k.mode = KappaMode::edge_enhancing;
        k.lambda = adapted.lambda_coherence;
        k.degenerate_coherence = degenerate_coherence_fraction * adapted.max_coherence;
    }
    return k;
}

/// Time scales of a pixel-grid experiment converted to a surface of length
/// scale L: Gaussian widths sigma become heat times sigma^2 / (2 L^2), stop
/// times scale with 1 / L^2.
struct TransferredTimes {
    double sigma = 0.0;
    double rho = 0.0;
    double stop_time = 0.0;
};

inline TransferredTimes transfer_parameters(double sigma_px, double rho_px, double stop_time_px, double length) {
    const double l2 = length * length;
    return {sigma_px * sigma_px / (2.0 * l2), rho_px * rho_px / (2.0 * l2), stop_time_px / l2};
}

// ---------------------------------------------------------------------------
// Time loops
// ---------------------------------------------------------------------------

struct StepDiagnostics {
    int step = 0;
    double time = 0.0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double max_coherence = std::numeric_limits<double>::quiet_NaN();
};

using StepObserver = std::function<void(const StepDiagnostics&)>;

inline StepDiagnostics summarize(const SurfaceField& v, int step, double time) {
    StepDiagnostics s;
    s.step = step;
    s.time = time;
    const auto& data = v.data();
    const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
    s.min = *lo;
    s.max = *hi;
    s.mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
    return s;
}

inline void write_diagnostics_header(std::ostream& out) { out << "step,time,min,max,mean,max_coherence\n"; }

inline void write_diagnostics_row(std::ostream& out, const StepDiagnostics& s) {
    out << s.step << ',' << s.time << ',' << s.min << ',' << s.max << ',' << s.mean << ',' << s.max_coherence << '\n';
}

struct FilterResult {
    SurfaceField field;
    int steps = 0;
    double tau = 0.0;
    AdaptedParams adapted;
};

namespace detail {

inline void check_finite(const SurfaceField& v, int step) {
    if (!v.all_finite()) {
        throw NonFiniteState("non-finite values after step " + std::to_string(step) + "; reduce the time step");
    }
}

inline void check_input(const Discretization& d, const SurfaceField& u0) {
    if (u0.size() != d.size()) throw ConfigError("field size does not match the band");
    if (!u0.all_finite()) throw NonFiniteState("initial data contains non-finite values");
}

} // namespace detail

inline FilterResult run_filter(const Discretization& d, const SurfaceField& u0, const FilterConfig& config,
                               const StepObserver& observer = {});

/// Linear surface diffusion until `stop_time`.
inline SurfaceField run_gaussian(const Discretization& d, const SurfaceField& u0, double stop_time) {
    FilterConfig config;
    config.kind = FilterKind::gaussian;
    config.stop_time = stop_time;
    return run_filter(d, u0, config, {}).field;
}

/// Isotropic nonlinear diffusion with g(|grad u_sigma|^2) and the isotropic
/// form of the anisotropic stencil. Channels share the diffusivity.
inline FilterResult run_perona_malik(const Discretization& d, const SurfaceField& u0, const FilterConfig& config,
                                     const StepObserver& observer = {}) {
    config.validate();
    detail::check_input(d, u0);
    FilterResult result;
    result.adapted = adapt_parameters(d, u0, config);
    const auto grid = time_grid(config, d.tau_nominal());
    result.steps = grid.steps;
    result.tau = grid.tau;
    SurfaceField v = u0;
    std::vector<double> g(d.size()), div(d.size()), w(d.size());
    const double lambda = result.adapted.lambda;
    for (int step = 0; step < grid.steps; ++step) {
        if (step % config.g_refresh == 0) {
            const auto s2 = gradient_magnitude_squared(d, v, config.sigma);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] = perona_malik_diffusivity(s2[i], lambda);
        }
        for (int c = 0; c < v.channels(); ++c) {
            auto ch = v.channel(c);
            isotropic_divergence(d.band, g, ch, div);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = ch[i] + grid.tau * div[i];
            d.extension.apply(w, ch);
        }
        detail::check_finite(v, step + 1);
        if (observer) observer(summarize(v, step + 1, (step + 1) * grid.tau));
    }
    v.extended = true;
    result.field = std::move(v);
    return result;
}

/// Edge- or coherence-enhancing diffusion. Every step rebuilds G from the
/// common structure tensor of all channels and applies it to each channel.
inline FilterResult run_anisotropic(const Discretization& d, const SurfaceField& u0, const FilterConfig& config,
                                    const StepObserver& observer = {}) {
    config.validate();
    detail::check_input(d, u0);
    if (config.kind != FilterKind::edge_enhancing && config.kind != FilterKind::coherence_enhancing) {
        throw ConfigError("run_anisotropic needs an edge- or coherence-enhancing filter");
    }
    FilterResult result;
    result.adapted = adapt_parameters(d, u0, config);
    const auto grid = time_grid(config, d.tau_nominal());
    result.steps = grid.steps;
    result.tau = grid.tau;
    const KappaParams params = kappa_params(config, result.adapted);
    SurfaceField v = u0;
    std::vector<double> div(d.size()), w(d.size());
    DiffusionTensor tensor;
    for (int step = 0; step < grid.steps; ++step) {
        if (step % config.g_refresh == 0) {
            tensor = build_diffusion_tensor(d, v, params, config.sigma, config.rho);
        }
        for (int c = 0; c < v.channels(); ++c) {
            auto ch = v.channel(c);
            anisotropic_divergence(d.band, tensor.g, ch, div);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = ch[i] + grid.tau * div[i];
            d.extension.apply(w, ch);
        }
        detail::check_finite(v, step + 1);
        if (observer) {
            auto s = summarize(v, step + 1, (step + 1) * grid.tau);
            s.max_coherence = tensor.max_coherence();
            observer(s);
        }
    }
    v.extended = true;
    result.field = std::move(v);
    return result;
}

/// Dispatch on config.kind.
inline FilterResult run_filter(const Discretization& d, const SurfaceField& u0, const FilterConfig& config,
                               const StepObserver& observer) {
    config.validate();
    switch (config.kind) {
    case FilterKind::gaussian: {
        detail::check_input(d, u0);
        const auto grid = time_grid(config, d.tau_nominal());
        FilterResult result;
        result.steps = grid.steps;
        result.tau = grid.tau;
        SurfaceField v = u0;
        std::vector<double> lap(d.size()), w(d.size());
        for (int step = 0; step < grid.steps; ++step) {
            for (int c = 0; c < v.channels(); ++c) {
                auto ch = v.channel(c);
                d.laplacian.apply(ch, lap);
                for (std::size_t i = 0; i < w.size(); ++i) w[i] = ch[i] + grid.tau * lap[i];
                d.extension.apply(w, ch);
            }
            detail::check_finite(v, step + 1);
            if (observer) observer(summarize(v, step + 1, (step + 1) * grid.tau));
        }
        v.extended = true;
        result.field = std::move(v);
        return result;
    }
    case FilterKind::perona_malik: return run_perona_malik(d, u0, config, observer);
    case FilterKind::edge_enhancing:
    case FilterKind::coherence_enhancing: return run_anisotropic(d, u0, config, observer);
    }
    throw ConfigError("unknown filter kind");
}

} // namespace cpsurf
