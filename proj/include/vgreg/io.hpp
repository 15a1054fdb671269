#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "vgreg/core.hpp"
#include "vgreg/rgbd.hpp"

namespace vgreg::io {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

enum class PlyEncoding { Ascii, BinaryLittleEndian };

/// Reads x/y/z (float or double) and, when all three are present, nx/ny/nz.
/// Other vertex properties and elements are skipped.
PointCloud read_ply(const fs::path& path);

/// Writes float32 properties, so binary files are header + 12 bytes per point
/// (24 with normals).
void write_ply(const PointCloud& cloud, const fs::path& path,
               PlyEncoding encoding = PlyEncoding::BinaryLittleEndian);

/// 16-bit P5 PGM or raw `.bin` (u32 width, u32 height, f32 depth_scale, then
/// u16 samples, all little-endian). A `.bin` header's depth_scale overwrites
/// `intrinsics.depth_scale`.
DepthImage read_depth(const fs::path& path, CameraIntrinsics& intrinsics);
DepthImage read_depth(const fs::path& path);
void write_depth_pgm(const DepthImage& depth, const fs::path& path);
void write_depth_bin(const DepthImage& depth, double depth_scale, const fs::path& path);

/// CSV with header `u0,v0,u1,v1[,score]`; score defaults to 1.
std::vector<PixelMatch> read_visual_matches(const fs::path& path);
void write_visual_matches(std::span<const PixelMatch> matches, const fs::path& path);

CameraIntrinsics read_intrinsics(const fs::path& path);
void write_intrinsics(const CameraIntrinsics& k, const fs::path& path);

Json read_json(const fs::path& path);
void write_json(const Json& j, const fs::path& path);

/// `{"transform": [[...], ...], "rotation_deg_axis_angle": {...}}`.
Json transform_to_json(const RigidTransform& t);
/// Accepts an object holding `transform` or a bare 4x4 array.
RigidTransform transform_from_json(const Json& j);
RigidTransform read_transform(const fs::path& path);

/// Rows of [px, py, pz, qx, qy, qz, weight, provenance].
Json correspondences_to_json(CorrespondenceView c);
CorrespondenceSet correspondences_from_json(const Json& j);

}  // namespace vgreg::io
