#include "vgreg/rgbd.hpp"

#include <cmath>

namespace vgreg {

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || !(depth_scale > 0.0) || !std::isfinite(fx) ||
        !std::isfinite(fy) || !std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(depth_scale)) {
        throw InvalidArgument("camera intrinsics need finite fx, fy, depth_scale > 0");
    }
}

void DepthImage::validate() const {
    if (values.size() != width * height) {
        throw InvalidArgument("depth image holds " + std::to_string(values.size()) + " values, expected " +
                              std::to_string(width * height));
    }
}

Point3 backproject_pixel(double u, double v, double z, const CameraIntrinsics& k) {
    return {(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z};
}

Eigen::Vector2d project(const Point3& p, const CameraIntrinsics& k) {
    return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& k,
                       std::optional<double> max_depth_m) {
    k.validate();
    depth.validate();
    PointCloud cloud;
    for (std::size_t v = 0; v < depth.height; ++v) {
        for (std::size_t u = 0; u < depth.width; ++u) {
            const std::uint16_t d = depth.at(u, v);
            if (d == 0) continue;
            const double z = d / k.depth_scale;
            if (max_depth_m && *max_depth_m > 0.0 && z > *max_depth_m) continue;
            cloud.points.push_back(backproject_pixel(static_cast<double>(u), static_cast<double>(v), z, k));
        }
    }
    return cloud;
}

namespace {

std::optional<Point3> lift(double u, double v, const DepthImage& depth, const CameraIntrinsics& k) {
    if (!std::isfinite(u) || !std::isfinite(v)) return std::nullopt;
    const double ru = std::round(u);
    const double rv = std::round(v);
    if (ru < 0.0 || rv < 0.0 || ru >= static_cast<double>(depth.width) ||
        rv >= static_cast<double>(depth.height)) {
        return std::nullopt;
    }
    const std::uint16_t d = depth.at(static_cast<std::size_t>(ru), static_cast<std::size_t>(rv));
    if (d == 0) return std::nullopt;
    return backproject_pixel(ru, rv, d / k.depth_scale, k);
}

}  // namespace

LiftedMatches lift_pixel_matches(std::span<const PixelMatch> matches, const DepthImage& depth0,
                                 const DepthImage& depth1, const CameraIntrinsics& k0,
                                 const CameraIntrinsics& k1) {
    k0.validate();
    k1.validate();
    depth0.validate();
    depth1.validate();
    LiftedMatches out;
    out.correspondences.reserve(matches.size());
    for (const PixelMatch& m : matches) {
        const auto p = lift(m.u0, m.v0, depth0, k0);
        const auto q = p ? lift(m.u1, m.v1, depth1, k1) : std::nullopt;
        if (!p || !q) {
            ++out.dropped;
            continue;
        }
        Correspondence c;
        c.source = *p;
        c.target = *q;
        c.weight = 1.0;
        c.provenance = Provenance::Visual;
        out.correspondences.push_back(c);
    }
    return out;
}

}  // namespace vgreg
