#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cpsurf/cpsurf.hpp>

#include "run_config.hpp"

namespace cpsurf::cli {

enum ExitCode : int { ok = 0, config_error = 1, numerical_error = 2, io_error = 3 };

/// Everything built from the [surface] and [grid] sections.
struct Scene {
    ClosestPointField cp;
    std::shared_ptr<const MeshSurface> mesh;
    Discretization disc;
};

/// Resolves an output path against the config directory and creates its
/// parent directory.
inline std::string output_path(const RunConfig& cfg, const std::string& p) {
    const std::string resolved = cfg.resolve(p);
    if (resolved.empty()) return resolved;
    const auto parent = std::filesystem::path(resolved).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
    return resolved;
}

inline ClosestPointField make_surface(const RunConfig& cfg, std::shared_ptr<const MeshSurface>& mesh) {
    const auto& s = cfg.surface;
    if (s.kind == "sphere") return ClosestPointField::sphere(s.radius);
    if (s.kind == "torus") return ClosestPointField::torus(s.major_radius, s.minor_radius);
    if (s.kind == "revolution") return ClosestPointField::revolution(Profile(read_profile_csv(cfg.resolve(s.profile))));
    mesh = std::make_shared<const MeshSurface>(read_mesh(cfg.resolve(s.mesh)));
    return ClosestPointField::mesh(mesh);
}

inline GridSpec grid_spec(const RunConfig& cfg) { return GridSpec::covering(cfg.grid.lower, cfg.grid.upper, cfg.grid.h); }

/// Band from the cache file when it matches the grid and radius, otherwise
/// built from scratch (and written to the cache when one is configured).
inline BandedGrid obtain_band(const RunConfig& cfg, const ClosestPointField& cp, std::ostream& log) {
    const GridSpec spec = grid_spec(cfg);
    const double radius = compute_band_radius(3, 1, spec.h);
    const std::string cache = cfg.resolve(cfg.grid.cache);
    if (!cache.empty() && std::filesystem::exists(cache)) {
        std::ifstream in(cache);
        const auto dump = read_band(in);
        const bool same = dump.spec.extents == spec.extents && std::abs(dump.spec.h - spec.h) <= 1e-15 * spec.h &&
                          (dump.spec.origin - spec.origin).norm() <= 1e-12 && std::abs(dump.radius - radius) <= 1e-12;
        if (same) {
            log << "band: loaded " << dump.points.size() << " points from " << cache << "\n";
            return band_from_points(cp, spec, radius, dump.points);
        }
        log << "band: cache " << cache << " does not match the grid; rebuilding\n";
    }
    auto band = build_band(cp, spec, radius);
    if (!cache.empty()) {
        std::ofstream out(output_path(cfg, cfg.grid.cache));
        if (!out) throw IoError("cannot write band cache '" + cache + "'");
        write_band(out, band);
    }
    return band;
}

inline Scene build_scene(const RunConfig& cfg, std::ostream& log) {
    std::shared_ptr<const MeshSurface> mesh;
    auto cp = make_surface(cfg, mesh);
    auto band = obtain_band(cfg, cp, log);
    log << "band: " << band.size() << " points, h=" << band.h() << ", radius=" << band.radius() << "\n";
    auto disc = build_discretization(std::move(band), cp, cfg.grid.tangents, cfg.grid.tau_factor);
    return Scene{std::move(cp), std::move(mesh), std::move(disc)};
}

inline RasterImage make_texture(const RunConfig& cfg) {
    const auto& t = cfg.texture;
    if (t.source == "stripes") return make_stripes(t.width, t.height, t.count);
    if (t.source == "checkerboard") return make_checkerboard(t.width, t.height, t.cells_u, t.cells_v);
    if (t.source == "wood") return make_wood_grain(t.width, t.height, t.seed, t.rings);
    if (t.source == "fingerprint") return make_fingerprint(t.width, t.height, t.seed, t.ridges, t.gap_fraction);
    return load_png(cfg.resolve(t.path));
}

inline SurfaceField initial_field(const RunConfig& cfg, const Scene& scene) {
    if (scene.mesh) return mesh_colors_to_surface(*scene.mesh, scene.disc.band);
    return texture_to_surface(make_texture(cfg), scene.cp, scene.disc.band, cfg.texture.projection);
}

inline void export_field(const RunConfig& cfg, const Scene& scene, const SurfaceField& field, const std::string& path) {
    if (path.empty()) return;
    export_surface(field, scene.disc.band, output_path(cfg, path));
}

inline void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

inline std::string format_db(double db) {
    if (std::isinf(db)) return "inf";
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << db;
    return s.str();
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline int command_band(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    std::shared_ptr<const MeshSurface> mesh;
    const auto cp = make_surface(cfg, mesh);
    const GridSpec spec = grid_spec(cfg);
    const auto band = build_band(cp, spec, compute_band_radius(3, 1, spec.h));
    const std::string path = !out_path.empty() ? out_path : output_path(cfg, cfg.grid.cache);
    if (path.empty()) throw ConfigError("band: no output path (use --out or grid.cache)");
    std::ofstream file(path);
    if (!file) throw IoError("cannot write band dump '" + path + "'");
    write_band(file, band);
    out << "band: " << band.size() << " points written to " << path << "\n";
    return ok;
}

inline int command_map(const RunConfig& cfg, const std::string& out_path, std::ostream& out) {
    const auto scene = build_scene(cfg, out);
    const auto clean = initial_field(cfg, scene);
    const std::string path = !out_path.empty() ? out_path : output_path(cfg, cfg.output.clean);
    if (path.empty()) throw ConfigError("map: no output path (use --out or output.clean)");
    export_surface(clean, scene.disc.band, path);
    out << "map: " << clean.channels() << "-channel field written to " << path << "\n";
    return ok;
}

inline int command_filter(const RunConfig& cfg, std::ostream& out) {
    const auto scene = build_scene(cfg, out);
    const auto& d = scene.disc;
    const auto clean = initial_field(cfg, scene);
    export_field(cfg, scene, clean, cfg.output.clean);
    const bool noisy_input = cfg.noise.model != NoiseModel::none && cfg.noise.strength > 0.0;
    const auto u0 = add_noise(clean, cfg.noise, d.extension);
    export_field(cfg, scene, u0, cfg.output.noisy);

    std::ofstream diagnostics;
    if (!cfg.output.diagnostics.empty()) {
        diagnostics.open(output_path(cfg, cfg.output.diagnostics));
        if (!diagnostics) throw IoError("cannot write diagnostics '" + cfg.output.diagnostics + "'");
        diagnostics.precision(12);
        write_diagnostics_header(diagnostics);
        write_diagnostics_row(diagnostics, summarize(u0, 0, 0.0));
    }
    StepObserver observer;
    if (diagnostics.is_open()) observer = [&](const StepDiagnostics& s) { write_diagnostics_row(diagnostics, s); };

    out << "filter: " << to_string(cfg.filter.kind) << ", tau_nominal=" << d.tau_nominal() << "\n";
    const auto result = run_filter(d, u0, cfg.filter, observer);
    out << "iterations: " << result.steps << "\n";
    out << "tau: " << result.tau << "\n";

    if (!cfg.output.tensor_csv.empty() &&
        (cfg.filter.kind == FilterKind::edge_enhancing || cfg.filter.kind == FilterKind::coherence_enhancing)) {
        const auto tensor = build_diffusion_tensor(d, result.field, kappa_params(cfg.filter, result.adapted),
                                                   cfg.filter.sigma, cfg.filter.rho);
        std::ofstream csv(output_path(cfg, cfg.output.tensor_csv));
        if (!csv) throw IoError("cannot write tensor dump '" + cfg.output.tensor_csv + "'");
        write_tensor_csv(csv, d.band, tensor);
    }
    export_field(cfg, scene, result.field, cfg.output.result);
    if (scene.mesh && !cfg.output.mesh.empty()) {
        write_ply(output_path(cfg, cfg.output.mesh), mesh_with_field_colors(scene.mesh->mesh(), result.field, d.band));
    }
    if (noisy_input) {
        out << "psnr_input: " << format_db(psnr(u0, clean)) << "\n";
        out << "psnr: " << format_db(psnr(result.field, clean)) << "\n";
    }
    return ok;
}

inline int command_metrics(const std::string& a, const std::string& b, std::ostream& out) {
    out << "psnr: " << format_db(psnr(read_ply(a), read_ply(b))) << "\n";
    return ok;
}

/// Command line entry point. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Anisotropic diffusion of surface images with the closest point method"};
    app.require_subcommand(1);

    std::string config_path, out_path, diagnostics_path, metrics_a, metrics_b;
    std::optional<int> threads, steps;
    std::optional<uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (INI)")->required();
        sub->add_option("--threads", threads, "worker threads, 0 = all cores");
    };
    auto* band = app.add_subcommand("band", "build the computational band and write it to a cache file");
    add_common(band);
    band->add_option("--out", out_path, "band dump path (default: grid.cache)");
    auto* map = app.add_subcommand("map", "map the texture onto the surface and export it");
    add_common(map);
    map->add_option("--out", out_path, "PLY path (default: output.clean)");
    std::vector<CLI::App*> runs;
    for (const char* name : {"filter", "run"}) {
        auto* sub = app.add_subcommand(name, "full pipeline: band, map, noise, filter, export, metrics");
        add_common(sub);
        sub->add_option("--diagnostics", diagnostics_path, "per-step CSV diagnostics");
        sub->add_option("--seed", seed, "noise seed (overrides noise.seed)");
        sub->add_option("--steps", steps, "run exactly this many steps (overrides filter.stop_time)");
        runs.push_back(sub);
    }
    auto* metrics = app.add_subcommand("metrics", "PSNR between the vertex colors of two PLY files");
    metrics->add_option("a", metrics_a)->required();
    metrics->add_option("b", metrics_b)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : config_error;
    }

    try {
        if (metrics->parsed()) return command_metrics(metrics_a, metrics_b, out);
        RunConfig cfg = load_run_config(config_path);
        if (threads) cfg.threads = *threads;
        if (seed) cfg.noise.seed = *seed;
        if (steps) {
            if (*steps < 0) throw ConfigError("--steps must be >= 0");
            cfg.filter.steps = *steps;
        }
        if (!diagnostics_path.empty()) cfg.output.diagnostics = std::filesystem::absolute(diagnostics_path).string();
        set_threads(cfg.threads);
        if (band->parsed()) return command_band(cfg, out_path, out);
        if (map->parsed()) return command_map(cfg, out_path, out);
        return command_filter(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const NonFiniteState& e) {
        err << "numerical failure: " << e.what() << "\n";
        return numerical_error;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return io_error;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return config_error;
    }
}

} // namespace cpsurf::cli
