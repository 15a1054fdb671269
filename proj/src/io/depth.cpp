#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "vgreg/errors.hpp"
#include "vgreg/io.hpp"

namespace vgreg::io {

namespace {

std::vector<unsigned char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing " + path.string());
}

// Reads one whitespace-delimited unsigned header token, skipping '#' comments.
std::size_t pgm_token(const std::vector<unsigned char>& b, std::size_t& off, const std::string& where) {
    for (;;) {
        while (off < b.size() && std::isspace(b[off])) ++off;
        if (off < b.size() && b[off] == '#') {
            while (off < b.size() && b[off] != '\n') ++off;
            continue;
        }
        break;
    }
    const std::size_t start = off;
    std::size_t value = 0;
    while (off < b.size() && std::isdigit(b[off])) {
        value = value * 10 + (b[off] - '0');
        if (value > (1u << 30)) throw ParseError(where + ": PGM header value too large", start);
        ++off;
    }
    if (off == start) throw ParseError(where + ": malformed PGM header", start);
    return value;
}

DepthImage decode_pgm(const std::vector<unsigned char>& b, const std::string& where) {
    std::size_t off = 2;
    DepthImage img;
    img.width = pgm_token(b, off, where);
    img.height = pgm_token(b, off, where);
    const std::size_t maxval = pgm_token(b, off, where);
    if (maxval == 0 || maxval > 65535) throw ParseError(where + ": PGM maxval out of range", off);
    if (maxval < 256) throw UnsupportedFormat(where + ": 8-bit PGM is not a depth image");
    if (off >= b.size() || !std::isspace(b[off])) throw ParseError(where + ": malformed PGM header", off);
    ++off;
    const std::size_t n = img.width * img.height;
    if (b.size() - off < 2 * n) throw ParseError(where + ": PGM raster truncated", b.size());
    img.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        img.values[i] = static_cast<std::uint16_t>((b[off + 2 * i] << 8) | b[off + 2 * i + 1]);
    }
    return img;
}

template <typename T>
T read_le(const std::vector<unsigned char>& b, std::size_t off) {
    T v;
    std::memcpy(&v, b.data() + off, sizeof(T));
    return v;
}

template <typename T>
void append_le(std::vector<unsigned char>& b, T v) {
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    b.insert(b.end(), raw, raw + sizeof(T));
}

DepthImage decode_bin(const std::vector<unsigned char>& b, const std::string& where, double& depth_scale) {
    if (b.size() < 12) throw ParseError(where + ": depth header truncated", b.size());
    DepthImage img;
    img.width = read_le<std::uint32_t>(b, 0);
    img.height = read_le<std::uint32_t>(b, 4);
    const float scale = read_le<float>(b, 8);
    if (!(scale > 0.0f) || !std::isfinite(scale)) throw ParseError(where + ": depth_scale must be positive", 8);
    const std::size_t n = img.width * img.height;
    if ((b.size() - 12) / 2 < n) throw ParseError(where + ": depth raster truncated", b.size());
    if (b.size() - 12 != 2 * n) throw ParseError(where + ": trailing bytes after depth raster", 12 + 2 * n);
    img.values.resize(n);
    std::memcpy(img.values.data(), b.data() + 12, 2 * n);
    depth_scale = scale;
    return img;
}

}  // namespace

DepthImage read_depth(const fs::path& path, CameraIntrinsics& intrinsics) {
    const std::string where = path.string();
    const auto bytes = slurp(path);
    const auto ext = path.extension().string();
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes, where);
    if (ext == ".pgm") {
        if (bytes.size() >= 2 && bytes[0] == 'P') throw UnsupportedFormat(where + ": only binary P5 PGM is supported");
        throw ParseError(where + ": missing PGM magic", 0);
    }
    if (ext == ".bin") {
        double scale = 0.0;
        DepthImage img = decode_bin(bytes, where, scale);
        intrinsics.depth_scale = scale;
        return img;
    }
    throw UnsupportedFormat(where + ": unrecognized depth format (expected .pgm or .bin)");
}

DepthImage read_depth(const fs::path& path) {
    CameraIntrinsics ignored;
    return read_depth(path, ignored);
}

void write_depth_pgm(const DepthImage& depth, const fs::path& path) {
    depth.validate();
    const std::string header =
        "P5\n" + std::to_string(depth.width) + " " + std::to_string(depth.height) + "\n65535\n";
    std::vector<unsigned char> b(header.begin(), header.end());
    b.reserve(b.size() + 2 * depth.values.size());
    for (const std::uint16_t v : depth.values) {
        b.push_back(static_cast<unsigned char>(v >> 8));
        b.push_back(static_cast<unsigned char>(v & 0xff));
    }
    spit(path, b);
}

void write_depth_bin(const DepthImage& depth, double depth_scale, const fs::path& path) {
    depth.validate();
    if (depth.width > UINT32_MAX || depth.height > UINT32_MAX) throw InvalidArgument("depth image too large");
    std::vector<unsigned char> b;
    append_le(b, static_cast<std::uint32_t>(depth.width));
    append_le(b, static_cast<std::uint32_t>(depth.height));
    append_le(b, static_cast<float>(depth_scale));
    for (const std::uint16_t v : depth.values) append_le(b, v);
    spit(path, b);
}

}  // namespace vgreg::io
