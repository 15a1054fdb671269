#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vgreg/core.hpp"
#include "vgreg/random.hpp"
#include "vgreg/rgbd.hpp"

namespace vgreg {

struct SynthConfig {
    std::size_t num_points = 5000;
    double scene_extent = 4.0;            // meters
    double gt_rotation_range = 30.0;      // degrees, max rotation angle
    double gt_translation_range = 0.5;    // meters, per-axis bound
    double noise_sigma = 0.01;            // meters, per-axis Gaussian
    std::size_t visual_count = 30;
    double visual_inlier_ratio = 0.9;
    std::size_t geo_count = 1000;
    double geo_inlier_ratio = 0.15;
    double outlier_extent = 4.0;          // meters, side of the outlier box
    std::uint64_t rng_seed = 0;

    /// Throws InvalidArgument on out-of-range values.
    void validate() const;
};

/// Scene surface element in the source camera frame.
struct Primitive {
    enum class Kind { Rectangle, Box, Sphere };
    Kind kind = Kind::Rectangle;
    Point3 center = Point3::Zero();
    Matrix3 axes = Matrix3::Identity();      // columns: local x, y, z
    Point3 half_extent = Point3::Zero();     // rectangle uses x, y; sphere uses x as radius

    double area() const;
    Point3 sample(Rng& rng) const;
    /// Smallest s > 0 with origin + s * dir on the surface.
    std::optional<double> intersect(const Point3& origin, const Point3& dir) const;
};

struct Scene {
    std::vector<Primitive> primitives;
    Point3 center = Point3::Zero();

    std::optional<double> intersect(const Point3& origin, const Point3& dir) const;
};

/// Room-like layout (floor, back and side wall, boxes, spheres) seeded by
/// `rng`, spanning roughly `extent` meters in front of the source camera.
Scene make_scene(double extent, Rng& rng);

struct PlantedInstance {
    SynthConfig config;
    Scene scene;
    PointCloud cloud0, cloud1;
    RigidTransform gt;
    CorrespondenceSet c_vis, c_geo;
    std::vector<std::uint8_t> vis_labels, geo_labels;  // 1 = planted inlier
};

/// Inliers: q = T_gt(p) + eta with eta ~ N(0, sigma^2 I) truncated at 6 sigma
/// per axis. Outliers: q uniform in a cube of side outlier_extent around the
/// mapped scene center. Inlier counts are round(count * ratio). Deterministic
/// per seed.
PlantedInstance generate_instance(const SynthConfig& cfg);

struct RgbdExportConfig {
    std::size_t width = 640, height = 480;
    CameraIntrinsics intrinsics{525.0, 525.0, 319.5, 239.5, 5000.0};
    std::size_t match_count = 300;
    double match_inlier_ratio = 1.0;
    std::uint64_t rng_seed = 0;
};

struct RgbdExport {
    DepthImage depth0, depth1;
    CameraIntrinsics intrinsics;
    std::vector<PixelMatch> matches;
    std::size_t inlier_matches = 0;
};

/// Ray-cast depth of `scene` seen by a camera whose frame is reached from the
/// source frame through `pose`. Depth beyond the 16-bit range is left at 0.
DepthImage render_depth(const Scene& scene, const RigidTransform& pose, const CameraIntrinsics& k,
                        std::size_t width, std::size_t height);

/// Both depth frames plus pixel matches. Inlier matches take a valid source
/// pixel, map its 3D point through gt and keep it if visible in frame 1;
/// outlier matches pair random valid pixels.
RgbdExport export_rgbd(const PlantedInstance& instance, const RgbdExportConfig& cfg);

}  // namespace vgreg
