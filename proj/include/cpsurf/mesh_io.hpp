#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace cpsurf {

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

/// Reads `v x y z [r g b]` and `f a b c ...` records. Polygons are fanned
/// into triangles; `a/b/c` face tokens keep only the vertex index; negative
/// indices count from the end. Vertex colors are kept only when every
/// vertex has one.
inline TriangleMesh read_obj(std::istream& in) {
    TriangleMesh mesh;
    std::vector<Vec3> colors;
    std::size_t colored = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z())) throw IoError("OBJ line " + std::to_string(line_no) + ": bad vertex");
            mesh.vertices.push_back(p);
            Vec3 c;
            if (ls >> c.x() >> c.y() >> c.z()) {
                colors.push_back(c);
                ++colored;
            } else {
                colors.push_back(Vec3::Zero());
            }
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) {
                const int k = std::stoi(tok.substr(0, tok.find('/')));
                idx.push_back(k > 0 ? k - 1 : static_cast<int>(mesh.vertices.size()) + k);
            }
            if (idx.size() < 3) throw IoError("OBJ line " + std::to_string(line_no) + ": face with < 3 vertices");
            for (std::size_t t = 1; t + 1 < idx.size(); ++t) mesh.faces.push_back({idx[0], idx[t], idx[t + 1]});
        }
    }
    if (colored == mesh.vertices.size() && colored > 0) mesh.colors = std::move(colors);
    return mesh;
}

inline TriangleMesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_obj(in);
}

inline void write_obj(std::ostream& out, const TriangleMesh& mesh) {
    out.precision(17);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& p = mesh.vertices[i];
        out << "v " << p.x() << ' ' << p.y() << ' ' << p.z();
        if (mesh.has_colors()) out << ' ' << mesh.colors[i].x() << ' ' << mesh.colors[i].y() << ' ' << mesh.colors[i].z();
        out << '\n';
    }
    for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

namespace detail {

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

inline PlyType ply_type(const std::string& s) {
    if (s == "char" || s == "int8") return PlyType::i8;
    if (s == "uchar" || s == "uint8") return PlyType::u8;
    if (s == "short" || s == "int16") return PlyType::i16;
    if (s == "ushort" || s == "uint16") return PlyType::u16;
    if (s == "int" || s == "int32") return PlyType::i32;
    if (s == "uint" || s == "uint32") return PlyType::u32;
    if (s == "float" || s == "float32") return PlyType::f32;
    if (s == "double" || s == "float64") return PlyType::f64;
    throw IoError("PLY: unknown property type '" + s + "'");
}

template <class T>
T read_le(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw IoError("PLY: unexpected end of binary data");
    return v;
}

inline double read_ply_value(std::istream& in, PlyType t, bool binary) {
    if (!binary) {
        double v;
        if (!(in >> v)) throw IoError("PLY: unexpected end of ascii data");
        return v;
    }
    switch (t) {
    case PlyType::i8: return read_le<int8_t>(in);
    case PlyType::u8: return read_le<uint8_t>(in);
    case PlyType::i16: return read_le<int16_t>(in);
    case PlyType::u16: return read_le<uint16_t>(in);
    case PlyType::i32: return read_le<int32_t>(in);
    case PlyType::u32: return read_le<uint32_t>(in);
    case PlyType::f32: return read_le<float>(in);
    case PlyType::f64: return read_le<double>(in);
    }
    return 0.0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::f32;
    bool is_list = false;
    PlyType count_type = PlyType::u8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

} // namespace detail

/// Reads ascii and binary_little_endian PLY files: vertex x/y/z, optional
/// red/green/blue (integer types scaled by 1/255, float types taken as is)
/// and face vertex_indices (or vertex_index). Other elements and
/// properties are skipped.
inline TriangleMesh read_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw IoError("PLY: missing magic");
    bool binary = false;
    std::vector<detail::PlyElement> elements;
    while (true) {
        if (!std::getline(in, line)) throw IoError("PLY: header not terminated");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "binary_little_endian") binary = true;
            else if (fmt != "ascii") throw IoError("PLY: unsupported format '" + fmt + "'");
        } else if (key == "element") {
            detail::PlyElement e;
            ls >> e.name >> e.count;
            elements.push_back(e);
        } else if (key == "property") {
            if (elements.empty()) throw IoError("PLY: property before element");
            detail::PlyProperty p;
            std::string type;
            ls >> type;
            if (type == "list") {
                std::string count_type, item_type;
                ls >> count_type >> item_type >> p.name;
                p.is_list = true;
                p.count_type = detail::ply_type(count_type);
                p.type = detail::ply_type(item_type);
            } else {
                p.type = detail::ply_type(type);
                ls >> p.name;
            }
            elements.back().properties.push_back(p);
        } else if (key == "end_header") {
            break;
        }
    }

    TriangleMesh mesh;
    bool colors = false;
    for (const auto& e : elements) {
        const bool is_vertex = e.name == "vertex";
        const bool is_face = e.name == "face";
        if (is_vertex) {
            mesh.vertices.resize(e.count);
            for (const auto& p : e.properties) colors = colors || p.name == "red";
            if (colors) mesh.colors.resize(e.count);
        }
        for (std::size_t r = 0; r < e.count; ++r) {
            for (const auto& p : e.properties) {
                if (p.is_list) {
                    const auto n = static_cast<std::size_t>(detail::read_ply_value(in, p.count_type, binary));
                    std::vector<int> idx(n);
                    for (auto& k : idx) k = static_cast<int>(detail::read_ply_value(in, p.type, binary));
                    if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
                        if (n < 3) throw IoError("PLY: face with < 3 vertices");
                        for (std::size_t t = 1; t + 1 < n; ++t) mesh.faces.push_back({idx[0], idx[t], idx[t + 1]});
                    }
                    continue;
                }
                const double v = detail::read_ply_value(in, p.type, binary);
                if (!is_vertex) continue;
                const bool integral = p.type != detail::PlyType::f32 && p.type != detail::PlyType::f64;
                const double c = integral ? v / 255.0 : v;
                if (p.name == "x") mesh.vertices[r].x() = v;
                else if (p.name == "y") mesh.vertices[r].y() = v;
                else if (p.name == "z") mesh.vertices[r].z() = v;
                else if (p.name == "red") mesh.colors[r].x() = c;
                else if (p.name == "green") mesh.colors[r].y() = c;
                else if (p.name == "blue") mesh.colors[r].z() = c;
            }
        }
    }
    return mesh;
}

inline TriangleMesh read_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_ply(in);
}

/// 8-bit quantization used by every exporter: round(clamp(v, 0, 1) * 255).
inline uint8_t quantize_color(double v) {
    if (!(v > 0.0)) return 0;
    return static_cast<uint8_t>(std::lround(std::min(v, 1.0) * 255.0));
}

/// Writes a binary_little_endian PLY with float positions, uchar colors
/// (when present) and int face lists.
inline void write_ply(std::ostream& out, const TriangleMesh& mesh) {
    const bool colors = mesh.has_colors();
    out << "ply\nformat binary_little_endian 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    auto put = [&](auto v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        for (int a = 0; a < 3; ++a) put(static_cast<float>(mesh.vertices[i][a]));
        if (colors) {
            for (int a = 0; a < 3; ++a) put(quantize_color(mesh.colors[i][a]));
        }
    }
    for (const auto& f : mesh.faces) {
        put(static_cast<uint8_t>(3));
        for (int k : f) put(static_cast<int32_t>(k));
    }
    if (!out) throw IoError("PLY: write failed");
}

inline void write_ply(const std::string& path, const TriangleMesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_ply(out, mesh);
}

/// Mesh from .obj or .ply by extension.
inline TriangleMesh read_mesh(const std::string& path) {
    auto ends_with = [&](const char* ext) {
        const std::size_t n = std::strlen(ext);
        return path.size() >= n && path.compare(path.size() - n, n, ext) == 0;
    };
    if (ends_with(".obj") || ends_with(".OBJ")) return read_obj(path);
    if (ends_with(".ply") || ends_with(".PLY")) return read_ply(path);
    throw IoError("unknown mesh format for '" + path + "' (expected .obj or .ply)");
}

// ---------------------------------------------------------------------------
// Profile curves
// ---------------------------------------------------------------------------

/// Reads a surface-of-revolution profile from CSV lines `s,z`. Lines that do
/// not start with a number (headers, comments) are skipped.
inline std::vector<Vec2> read_profile_csv(std::istream& in) {
    std::vector<Vec2> pts;
    std::string line;
    while (std::getline(in, line)) {
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double s, z;
        if (ls >> s >> z) pts.emplace_back(s, z);
    }
    return pts;
}

inline std::vector<Vec2> read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return read_profile_csv(in);
}

} // namespace cpsurf
