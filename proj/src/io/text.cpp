#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vgreg/errors.hpp"
#include "vgreg/io.hpp"

namespace vgreg::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

double to_double(std::string_view tok, const std::string& where, std::size_t line_no) {
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || r.ec != std::errc{} || r.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError(where + ":" + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'", line_no);
    }
    return v;
}

std::string shortest(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, r.ptr};
}

}  // namespace

std::vector<PixelMatch> read_visual_matches(const fs::path& path) {
    const std::string where = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + where);
    std::string line;
    std::size_t line_no = 0;
    bool has_score = false;
    for (;;) {
        if (!std::getline(in, line)) throw ParseError(where + ": missing header line", line_no + 1);
        ++line_no;
        std::string_view s = line;
        if (line_no == 1 && s.starts_with("\xEF\xBB\xBF")) s.remove_prefix(3);
        if (trim(s).empty()) continue;
        const auto cols = split_commas(s);
        const std::vector<std::string_view> base{"u0", "v0", "u1", "v1"};
        if (cols.size() < 4 || cols.size() > 5 || !std::equal(base.begin(), base.end(), cols.begin()) ||
            (cols.size() == 5 && cols[4] != "score")) {
            throw ParseError(where + ":" + std::to_string(line_no) + ": expected header u0,v0,u1,v1[,score]", line_no);
        }
        has_score = cols.size() == 5;
        break;
    }
    std::vector<PixelMatch> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cols = split_commas(line);
        // A score header still tolerates rows that omit it.
        if (cols.size() != 4 && !(has_score && cols.size() == 5)) {
            throw ParseError(where + ":" + std::to_string(line_no) + ": expected " + (has_score ? "4 or 5" : "4") +
                                 " columns, got " + std::to_string(cols.size()),
                             line_no);
        }
        PixelMatch m;
        m.u0 = to_double(cols[0], where, line_no);
        m.v0 = to_double(cols[1], where, line_no);
        m.u1 = to_double(cols[2], where, line_no);
        m.v1 = to_double(cols[3], where, line_no);
        if (cols.size() == 5) m.score = to_double(cols[4], where, line_no);
        out.push_back(m);
    }
    return out;
}

void write_visual_matches(std::span<const PixelMatch> matches, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "u0,v0,u1,v1,score\n";
    for (const auto& m : matches) {
        out << shortest(m.u0) << ',' << shortest(m.v0) << ',' << shortest(m.u1) << ',' << shortest(m.v1) << ','
            << shortest(m.score) << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), e.byte);
    }
}

void write_json(const Json& j, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

CameraIntrinsics read_intrinsics(const fs::path& path) {
    const Json j = read_json(path);
    CameraIntrinsics k;
    const char* required[] = {"fx", "fy", "cx", "cy"};
    try {
        for (const char* key : required) {
            if (!j.contains(key)) throw ParseError(path.string() + ": intrinsics missing '" + key + "'");
        }
        k.fx = j.at("fx").get<double>();
        k.fy = j.at("fy").get<double>();
        k.cx = j.at("cx").get<double>();
        k.cy = j.at("cy").get<double>();
        if (j.contains("depth_scale")) k.depth_scale = j.at("depth_scale").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    k.validate();
    return k;
}

void write_intrinsics(const CameraIntrinsics& k, const fs::path& path) {
    write_json(Json{{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"depth_scale", k.depth_scale}}, path);
}

Json transform_to_json(const RigidTransform& t) {
    const Matrix4 m = t.matrix();
    Json rows = Json::array();
    for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
    const Eigen::AngleAxisd aa(t.rotation());
    Point3 axis = aa.axis();
    if (!axis.allFinite()) axis = Point3::UnitZ();
    return Json{{"transform", rows},
                {"rotation_deg_axis_angle",
                 {{"angle_deg", t.angle() * 180.0 / std::numbers::pi}, {"axis", {axis.x(), axis.y(), axis.z()}}}}};
}

RigidTransform transform_from_json(const Json& j) {
    const Json& rows = j.is_object() ? j.at("transform") : j;
    if (!rows.is_array() || rows.size() != 4) throw ParseError("transform must be a 4x4 array");
    Matrix4 m;
    for (int r = 0; r < 4; ++r) {
        if (!rows[r].is_array() || rows[r].size() != 4) throw ParseError("transform must be a 4x4 array");
        for (int c = 0; c < 4; ++c) m(r, c) = rows[r][c].get<double>();
    }
    return RigidTransform::from_matrix(m);
}

RigidTransform read_transform(const fs::path& path) {
    const Json j = read_json(path);
    try {
        return transform_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Json correspondences_to_json(CorrespondenceView c) {
    Json arr = Json::array();
    for (const auto& x : c) {
        arr.push_back({x.source.x(), x.source.y(), x.source.z(), x.target.x(), x.target.y(), x.target.z(), x.weight,
                       to_string(x.provenance)});
    }
    return arr;
}

CorrespondenceSet correspondences_from_json(const Json& j) {
    CorrespondenceSet out;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != 8) throw ParseError("correspondence rows need 8 entries");
        Correspondence c;
        c.source = {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()};
        c.target = {row[3].get<double>(), row[4].get<double>(), row[5].get<double>()};
        c.weight = row[6].get<double>();
        const auto prov = row[7].get<std::string>();
        if (prov == to_string(Provenance::Visual)) c.provenance = Provenance::Visual;
        else if (prov == to_string(Provenance::Geometric)) c.provenance = Provenance::Geometric;
        else throw ParseError("unknown provenance '" + prov + "'");
        out.push_back(c);
    }
    return out;
}

}  // namespace vgreg::io
