#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg {

/// Pinhole camera. depth_scale is raw depth units per meter (1000 for mm).
struct CameraIntrinsics {
    double fx = 525.0, fy = 525.0;
    double cx = 319.5, cy = 239.5;
    double depth_scale = 1000.0;

    /// Throws InvalidArgument unless fx, fy, depth_scale > 0 and all finite.
    void validate() const;

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Row-major raw depth; 0 marks a missing measurement.
struct DepthImage {
    std::size_t width = 0, height = 0;
    std::vector<std::uint16_t> values;

    std::uint16_t at(std::size_t u, std::size_t v) const { return values[v * width + u]; }
    void validate() const;

    friend bool operator==(const DepthImage&, const DepthImage&) = default;
};

struct PixelMatch {
    double u0 = 0, v0 = 0;
    double u1 = 0, v1 = 0;
    double score = 1.0;

    friend bool operator==(const PixelMatch&, const PixelMatch&) = default;
};

/// Camera-frame point of pixel (u, v) at metric depth z.
Point3 backproject_pixel(double u, double v, double z, const CameraIntrinsics& k);

/// Pixel coordinates of a camera-frame point (z must be non-zero).
Eigen::Vector2d project(const Point3& p, const CameraIntrinsics& k);

/// One point per pixel with depth > 0, in row-major pixel order. A positive
/// max_depth_m drops farther pixels.
PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& k,
                       std::optional<double> max_depth_m = std::nullopt);

struct LiftedMatches {
    CorrespondenceSet correspondences;
    std::size_t dropped = 0;
};

/// Rounds each match to the nearest pixel in both images and backprojects
/// it. Matches outside either image or with zero depth at either end are
/// dropped and counted. Output correspondences are visual with weight 1.
LiftedMatches lift_pixel_matches(std::span<const PixelMatch> matches, const DepthImage& depth0,
                                 const DepthImage& depth1, const CameraIntrinsics& k0,
                                 const CameraIntrinsics& k1);

}  // namespace vgreg
