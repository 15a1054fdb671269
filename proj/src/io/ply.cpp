#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vgreg/errors.hpp"
#include "vgreg/io.hpp"

namespace vgreg::io {

namespace {

static_assert(std::endian::native == std::endian::little, "binary I/O assumes a little-endian host");

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::size_t type_size(ScalarType t) {
    switch (t) {
        case ScalarType::Int8:
        case ScalarType::UInt8: return 1;
        case ScalarType::Int16:
        case ScalarType::UInt16: return 2;
        case ScalarType::Int32:
        case ScalarType::UInt32:
        case ScalarType::Float32: return 4;
        case ScalarType::Float64: return 8;
    }
    return 0;
}

std::optional<ScalarType> parse_type(std::string_view s) {
    if (s == "char" || s == "int8") return ScalarType::Int8;
    if (s == "uchar" || s == "uint8") return ScalarType::UInt8;
    if (s == "short" || s == "int16") return ScalarType::Int16;
    if (s == "ushort" || s == "uint16") return ScalarType::UInt16;
    if (s == "int" || s == "int32") return ScalarType::Int32;
    if (s == "uint" || s == "uint32") return ScalarType::UInt32;
    if (s == "float" || s == "float32") return ScalarType::Float32;
    if (s == "double" || s == "float64") return ScalarType::Float64;
    return std::nullopt;
}

struct Property {
    std::string name;
    ScalarType type = ScalarType::Float32;
    bool is_list = false;
    ScalarType count_type = ScalarType::UInt8;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
};

struct Header {
    bool binary = false;
    std::vector<Element> elements;
    std::size_t lines = 0;  // header lines including end_header
};

double decode(const char* p, ScalarType t) {
    switch (t) {
        case ScalarType::Int8: { std::int8_t v; std::memcpy(&v, p, 1); return v; }
        case ScalarType::UInt8: { std::uint8_t v; std::memcpy(&v, p, 1); return v; }
        case ScalarType::Int16: { std::int16_t v; std::memcpy(&v, p, 2); return v; }
        case ScalarType::UInt16: { std::uint16_t v; std::memcpy(&v, p, 2); return v; }
        case ScalarType::Int32: { std::int32_t v; std::memcpy(&v, p, 4); return v; }
        case ScalarType::UInt32: { std::uint32_t v; std::memcpy(&v, p, 4); return v; }
        case ScalarType::Float32: { float v; std::memcpy(&v, p, 4); return v; }
        case ScalarType::Float64: { double v; std::memcpy(&v, p, 8); return v; }
    }
    return 0.0;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

Header parse_header(std::istream& in, const std::string& where) {
    Header h;
    std::string line;
    if (!std::getline(in, line) || split_ws(line) != std::vector<std::string_view>{"ply"}) {
        throw ParseError(where + ": missing 'ply' magic", 1);
    }
    h.lines = 1;
    bool have_format = false;
    for (;;) {
        if (!std::getline(in, line)) throw ParseError(where + ": header has no end_header", h.lines);
        ++h.lines;
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "end_header") break;
        if (tok[0] == "format") {
            if (tok.size() < 2) throw ParseError(where + ": malformed format line", h.lines);
            if (tok[1] == "ascii") h.binary = false;
            else if (tok[1] == "binary_little_endian") h.binary = true;
            else throw UnsupportedFormat(where + ": PLY format '" + std::string(tok[1]) + "' is not supported");
            have_format = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) throw ParseError(where + ": malformed element line", h.lines);
            Element e;
            e.name = tok[1];
            const auto r = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), e.count);
            if (r.ec != std::errc{}) throw ParseError(where + ": bad element count", h.lines);
            h.elements.push_back(std::move(e));
        } else if (tok[0] == "property") {
            if (h.elements.empty()) throw ParseError(where + ": property before any element", h.lines);
            Property p;
            if (tok.size() == 5 && tok[1] == "list") {
                const auto ct = parse_type(tok[2]);
                const auto vt = parse_type(tok[3]);
                if (!ct || !vt) throw ParseError(where + ": unknown list property type", h.lines);
                p.is_list = true;
                p.count_type = *ct;
                p.type = *vt;
                p.name = tok[4];
            } else if (tok.size() == 3) {
                const auto t = parse_type(tok[1]);
                if (!t) throw ParseError(where + ": unknown property type '" + std::string(tok[1]) + "'", h.lines);
                p.type = *t;
                p.name = tok[2];
            } else {
                throw ParseError(where + ": malformed property line", h.lines);
            }
            h.elements.back().properties.push_back(std::move(p));
        } else {
            throw ParseError(where + ": unexpected header keyword '" + std::string(tok[0]) + "'", h.lines);
        }
    }
    if (!have_format) throw ParseError(where + ": header has no format line", h.lines);
    return h;
}

int find_property(const Element& e, std::string_view name) {
    for (std::size_t i = 0; i < e.properties.size(); ++i) {
        if (e.properties[i].name == name && !e.properties[i].is_list) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

PointCloud read_ply(const fs::path& path) {
    const std::string where = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + where);
    const Header h = parse_header(in, where);

    std::size_t vertex_elem = h.elements.size();
    for (std::size_t i = 0; i < h.elements.size(); ++i) {
        if (h.elements[i].name == "vertex") vertex_elem = i;
    }
    if (vertex_elem == h.elements.size()) throw ParseError(where + ": no vertex element", h.lines);
    const Element& ve = h.elements[vertex_elem];
    std::array<int, 3> xyz{};
    const char* axis_names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        xyz[a] = find_property(ve, axis_names[a]);
        if (xyz[a] < 0) {
            throw ParseError(where + ": vertex element has no '" + axis_names[a] + "' property", h.lines);
        }
    }
    const std::array<int, 3> nxyz{find_property(ve, "nx"), find_property(ve, "ny"), find_property(ve, "nz")};
    const bool has_normals = nxyz[0] >= 0 && nxyz[1] >= 0 && nxyz[2] >= 0;

    PointCloud cloud;
    cloud.points.reserve(ve.count);
    if (has_normals) cloud.normals.reserve(ve.count);
    std::vector<double> row;

    if (!h.binary) {
        std::string line;
        std::size_t line_no = h.lines;
        for (std::size_t ei = 0; ei < h.elements.size(); ++ei) {
            const Element& e = h.elements[ei];
            for (std::size_t r = 0; r < e.count; ++r) {
                if (!std::getline(in, line)) {
                    throw ParseError(where + ": file ends inside element '" + e.name + "'", line_no + 1);
                }
                ++line_no;
                if (ei != vertex_elem) continue;
                const auto tok = split_ws(line);
                row.assign(e.properties.size(), 0.0);
                std::size_t t = 0;
                for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
                    if (e.properties[pi].is_list) {
                        throw ParseError(where + ": list properties on vertices are not supported", line_no);
                    }
                    if (t >= tok.size()) throw ParseError(where + ": too few values in vertex row", line_no);
                    const auto r2 = std::from_chars(tok[t].data(), tok[t].data() + tok[t].size(), row[pi]);
                    if (r2.ec != std::errc{} || r2.ptr != tok[t].data() + tok[t].size()) {
                        throw ParseError(where + ": bad number '" + std::string(tok[t]) + "'", line_no);
                    }
                    ++t;
                }
                cloud.points.emplace_back(row[xyz[0]], row[xyz[1]], row[xyz[2]]);
                if (has_normals) cloud.normals.emplace_back(row[nxyz[0]], row[nxyz[1]], row[nxyz[2]]);
            }
        }
        return cloud;
    }

    const auto header_bytes = static_cast<std::size_t>(in.tellg());
    const std::vector<char> buf{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::size_t off = 0;
    auto need = [&](std::size_t n) {
        if (off + n > buf.size()) {
            throw ParseError(where + ": binary body truncated", header_bytes + off);
        }
    };
    for (std::size_t ei = 0; ei < h.elements.size(); ++ei) {
        const Element& e = h.elements[ei];
        for (std::size_t r = 0; r < e.count; ++r) {
            if (ei == vertex_elem) row.assign(e.properties.size(), 0.0);
            for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
                const Property& p = e.properties[pi];
                if (p.is_list) {
                    need(type_size(p.count_type));
                    const double n = decode(buf.data() + off, p.count_type);
                    off += type_size(p.count_type);
                    if (!(n >= 0)) throw ParseError(where + ": negative list length", header_bytes + off);
                    const std::size_t bytes = static_cast<std::size_t>(n) * type_size(p.type);
                    need(bytes);
                    off += bytes;
                    continue;
                }
                need(type_size(p.type));
                if (ei == vertex_elem) row[pi] = decode(buf.data() + off, p.type);
                off += type_size(p.type);
            }
            if (ei != vertex_elem) continue;
            cloud.points.emplace_back(row[xyz[0]], row[xyz[1]], row[xyz[2]]);
            if (has_normals) cloud.normals.emplace_back(row[nxyz[0]], row[nxyz[1]], row[nxyz[2]]);
        }
    }
    return cloud;
}

void write_ply(const PointCloud& cloud, const fs::path& path, PlyEncoding encoding) {
    cloud.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    const bool normals = cloud.has_normals();
    const bool binary = encoding == PlyEncoding::BinaryLittleEndian;
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
        << "element vertex " << cloud.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n";
    if (normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
    out << "end_header\n";

    std::vector<float> row;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        row.assign({static_cast<float>(cloud.points[i].x()), static_cast<float>(cloud.points[i].y()),
                    static_cast<float>(cloud.points[i].z())});
        if (normals) {
            row.insert(row.end(), {static_cast<float>(cloud.normals[i].x()), static_cast<float>(cloud.normals[i].y()),
                                   static_cast<float>(cloud.normals[i].z())});
        }
        if (binary) {
            out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
        } else {
            // Shortest round-trip float text.
            std::array<char, 32> txt{};
            for (std::size_t k = 0; k < row.size(); ++k) {
                const auto r = std::to_chars(txt.data(), txt.data() + txt.size(), row[k]);
                if (k) out << ' ';
                out.write(txt.data(), r.ptr - txt.data());
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace vgreg::io
