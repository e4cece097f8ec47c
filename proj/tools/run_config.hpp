#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <cpsurf/cpsurf.hpp>

namespace cpsurf::cli {

struct SurfaceSection {
    std::string kind = "torus";
    double radius = 1.0;
    double major_radius = 1.0;
    double minor_radius = 0.4;
    std::string profile;
    std::string mesh;
};

struct GridSection {
    double h = 0.0125;
    Vec3 lower = Vec3::Constant(-1.5);
    Vec3 upper = Vec3::Constant(1.5);
    TangentMethod tangents = TangentMethod::householder;
    double tau_factor = 0.15;
    std::string cache;
};

struct TextureSection {
    std::string source = "stripes";
    std::string path;
    int width = 512;
    int height = 256;
    int count = 16;
    int cells_u = 16;
    int cells_v = 8;
    uint64_t seed = 7;
    double rings = 9.0;
    double ridges = 14.0;
    double gap_fraction = 0.25;
    TextureProjection projection = TextureProjection::native;
};

struct OutputSection {
    std::string result;
    std::string clean;
    std::string noisy;
    std::string diagnostics;
    std::string tensor_csv;
    std::string mesh;
};

struct RunConfig {
    SurfaceSection surface;
    GridSection grid;
    TextureSection texture;
    NoiseSpec noise;
    FilterConfig filter;
    OutputSection output;
    int threads = 0;
    std::filesystem::path base_dir;

    std::string resolve(const std::string& p) const {
        if (p.empty()) return p;
        const std::filesystem::path path(p);
        return path.is_absolute() ? p : (base_dir / path).string();
    }
};

namespace detail {

using Schema = std::map<std::string, std::set<std::string>>;

inline const Schema& schema() {
    static const Schema s{
        {"surface", {"kind", "radius", "major_radius", "minor_radius", "profile", "mesh"}},
        {"grid", {"h", "lower", "upper", "tangents", "tau_factor", "cache"}},
        {"texture",
         {"source", "path", "width", "height", "count", "cells_u", "cells_v", "seed", "rings", "ridges",
          "gap_fraction", "projection"}},
        {"noise", {"model", "strength", "seed", "palette"}},
        {"filter", {"kind", "sigma", "rho", "lambda_rel", "alpha", "b_rel", "stop_time", "g_refresh", "steps"}},
        {"output", {"result", "clean", "noisy", "diagnostics", "tensor_csv", "mesh"}},
        {"run", {"threads"}},
    };
    return s;
}

template <class T>
T parse_value(const std::string& field, const std::string& text) {
    std::istringstream in(text);
    T value{};
    if (!(in >> value) || !(in >> std::ws).eof()) {
        throw ConfigError(field + ": cannot parse '" + text + "'");
    }
    return value;
}

inline std::vector<double> parse_list(const std::string& field, const std::string& text, char sep) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(parse_value<double>(field, item));
    return out;
}

inline Vec3 parse_vec3(const std::string& field, const std::string& text) {
    const auto v = parse_list(field, text, ',');
    if (v.size() != 3) throw ConfigError(field + ": expected three comma-separated numbers");
    return {v[0], v[1], v[2]};
}

/// "0; 1" or "0.2,0.1,0.0; 1,1,1": entries separated by ';', channels by ','.
inline std::vector<std::vector<double>> parse_palette(const std::string& field, const std::string& text) {
    std::vector<std::vector<double>> out;
    std::istringstream in(text);
    std::string entry;
    while (std::getline(in, entry, ';')) out.push_back(parse_list(field, entry, ','));
    return out;
}

class Section {
public:
    Section(std::string name, const boost::property_tree::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) const {
        if (!tree_) return std::nullopt;
        const auto v = tree_->get_optional<std::string>(key);
        if (!v) return std::nullopt;
        return *v;
    }

    template <class T>
    void get(const std::string& key, T& target) const {
        if (const auto v = raw(key)) {
            if constexpr (std::is_same_v<T, std::string>) target = *v;
            else target = parse_value<T>(field(key), *v);
        }
    }

    std::string field(const std::string& key) const { return name_ + "." + key; }

private:
    std::string name_;
    const boost::property_tree::ptree* tree_;
};

} // namespace detail

/// Parses a run configuration in INI syntax. Every section and key must be
/// known; numeric values are validated here and name the offending field.
inline RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    const auto& schema = detail::schema();
    for (const auto& [name, section] : tree) {
        const auto it = schema.find(name);
        if (it == schema.end()) {
            if (section.empty()) throw ConfigError("config key '" + name + "' is outside any section");
            throw ConfigError("unknown config section [" + name + "]");
        }
        for (const auto& [key, value] : section) {
            if (!it->second.count(key)) throw ConfigError("unknown config key '" + name + "." + key + "'");
        }
    }
    auto section = [&](const std::string& name) {
        const auto child = tree.get_child_optional(name);
        return detail::Section(name, child ? &*child : nullptr);
    };

    RunConfig cfg;
    cfg.base_dir = base_dir;

    const auto surface = section("surface");
    surface.get("kind", cfg.surface.kind);
    surface.get("radius", cfg.surface.radius);
    surface.get("major_radius", cfg.surface.major_radius);
    surface.get("minor_radius", cfg.surface.minor_radius);
    surface.get("profile", cfg.surface.profile);
    surface.get("mesh", cfg.surface.mesh);
    const std::set<std::string> kinds{"sphere", "torus", "revolution", "mesh"};
    if (!kinds.count(cfg.surface.kind)) throw ConfigError("surface.kind: unknown surface '" + cfg.surface.kind + "'");
    if (cfg.surface.kind == "sphere" && !(cfg.surface.radius > 0.0)) {
        throw ConfigError("surface.radius must be positive");
    }
    if (cfg.surface.kind == "torus" &&
        !(cfg.surface.minor_radius > 0.0 && cfg.surface.major_radius > cfg.surface.minor_radius)) {
        throw ConfigError("surface.major_radius and surface.minor_radius must satisfy R > r > 0");
    }
    if (cfg.surface.kind == "revolution" && cfg.surface.profile.empty()) {
        throw ConfigError("surface.profile is required for surfaces of revolution");
    }
    if (cfg.surface.kind == "mesh" && cfg.surface.mesh.empty()) {
        throw ConfigError("surface.mesh is required for mesh surfaces");
    }

    const auto grid = section("grid");
    grid.get("h", cfg.grid.h);
    if (!(cfg.grid.h > 0.0) || !std::isfinite(cfg.grid.h)) {
        throw ConfigError("grid.h must be a positive number (got " + *grid.raw("h") + ")");
    }
    if (const auto v = grid.raw("lower")) cfg.grid.lower = detail::parse_vec3("grid.lower", *v);
    if (const auto v = grid.raw("upper")) cfg.grid.upper = detail::parse_vec3("grid.upper", *v);
    for (int a = 0; a < 3; ++a) {
        if (!(cfg.grid.upper[a] > cfg.grid.lower[a])) throw ConfigError("grid.upper must exceed grid.lower on every axis");
    }
    if (const auto v = grid.raw("tangents")) {
        if (*v == "householder") cfg.grid.tangents = TangentMethod::householder;
        else if (*v == "cp_jacobian") cfg.grid.tangents = TangentMethod::cp_jacobian;
        else throw ConfigError("grid.tangents: expected householder or cp_jacobian");
    }
    grid.get("tau_factor", cfg.grid.tau_factor);
    if (!(cfg.grid.tau_factor > 0.0 && cfg.grid.tau_factor <= 0.5)) {
        throw ConfigError("grid.tau_factor must lie in (0, 0.5]");
    }
    grid.get("cache", cfg.grid.cache);

    const auto texture = section("texture");
    texture.get("source", cfg.texture.source);
    texture.get("path", cfg.texture.path);
    texture.get("width", cfg.texture.width);
    texture.get("height", cfg.texture.height);
    texture.get("count", cfg.texture.count);
    texture.get("cells_u", cfg.texture.cells_u);
    texture.get("cells_v", cfg.texture.cells_v);
    texture.get("seed", cfg.texture.seed);
    texture.get("rings", cfg.texture.rings);
    texture.get("ridges", cfg.texture.ridges);
    texture.get("gap_fraction", cfg.texture.gap_fraction);
    if (const auto v = texture.raw("projection")) cfg.texture.projection = texture_projection_from_string(*v);
    const std::set<std::string> sources{"stripes", "checkerboard", "wood", "fingerprint", "png", "mesh_colors"};
    if (!sources.count(cfg.texture.source)) {
        throw ConfigError("texture.source: unknown source '" + cfg.texture.source + "'");
    }
    if (cfg.texture.width < 1 || cfg.texture.height < 1) throw ConfigError("texture.width and texture.height must be >= 1");
    if (cfg.texture.count < 1) throw ConfigError("texture.count must be >= 1");
    if (cfg.texture.cells_u < 1 || cfg.texture.cells_v < 1) throw ConfigError("texture.cells_u/v must be >= 1");
    if (cfg.texture.source == "png" && cfg.texture.path.empty()) throw ConfigError("texture.path is required for png");
    if ((cfg.texture.source == "mesh_colors") != (cfg.surface.kind == "mesh")) {
        throw ConfigError("texture.source: mesh surfaces take mesh_colors, other surfaces take an image source");
    }

    const auto noise = section("noise");
    if (const auto v = noise.raw("model")) cfg.noise.model = noise_model_from_string(*v);
    noise.get("strength", cfg.noise.strength);
    noise.get("seed", cfg.noise.seed);
    if (const auto v = noise.raw("palette")) cfg.noise.palette = detail::parse_palette("noise.palette", *v);
    cfg.noise.validate();

    const auto filter = section("filter");
    if (const auto v = filter.raw("kind")) cfg.filter.kind = filter_kind_from_string(*v);
    filter.get("sigma", cfg.filter.sigma);
    filter.get("rho", cfg.filter.rho);
    filter.get("lambda_rel", cfg.filter.lambda_rel);
    filter.get("alpha", cfg.filter.alpha);
    filter.get("b_rel", cfg.filter.b_rel);
    filter.get("stop_time", cfg.filter.stop_time);
    filter.get("g_refresh", cfg.filter.g_refresh);
    if (const auto v = filter.raw("steps")) cfg.filter.steps = detail::parse_value<int>("filter.steps", *v);
    cfg.filter.validate();

    const auto output = section("output");
    output.get("result", cfg.output.result);
    output.get("clean", cfg.output.clean);
    output.get("noisy", cfg.output.noisy);
    output.get("diagnostics", cfg.output.diagnostics);
    output.get("tensor_csv", cfg.output.tensor_csv);
    output.get("mesh", cfg.output.mesh);

    section("run").get("threads", cfg.threads);
    if (cfg.threads < 0) throw ConfigError("run.threads must be >= 0");
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return parse_run_config(in, std::filesystem::path(path).parent_path());
}

} // namespace cpsurf::cli
