#include <algorithm>
#include <cmath>
#include <numbers>

#include "vgreg/synth.hpp"

namespace vgreg {

void SynthConfig::validate() const {
    auto ratio_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!ratio_ok(visual_inlier_ratio) || !ratio_ok(geo_inlier_ratio)) {
        throw InvalidArgument("synthetic inlier ratios must lie in [0, 1]");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidArgument("noise_sigma must be >= 0");
    if (!(scene_extent > 0.0)) throw InvalidArgument("scene_extent must be positive");
    if (!(outlier_extent > 0.0)) throw InvalidArgument("outlier_extent must be positive");
    if (!(gt_rotation_range >= 0.0 && gt_rotation_range <= 180.0)) {
        throw InvalidArgument("gt_rotation_range must lie in [0, 180] degrees");
    }
    if (!(gt_translation_range >= 0.0)) throw InvalidArgument("gt_translation_range must be >= 0");
    if (num_points == 0 && (visual_count > 0 || geo_count > 0)) {
        throw InvalidArgument("correspondences need num_points >= 1");
    }
}

namespace {

double truncated_gaussian(Rng& rng, double sigma) {
    if (sigma == 0.0) return 0.0;
    std::normal_distribution<double> g(0.0, sigma);
    for (;;) {
        const double v = g(rng);
        if (std::abs(v) <= 6.0 * sigma) return v;
    }
}

Point3 noise3(Rng& rng, double sigma) {
    // Sequenced explicitly; argument evaluation order is unspecified.
    const double x = truncated_gaussian(rng, sigma);
    const double y = truncated_gaussian(rng, sigma);
    const double z = truncated_gaussian(rng, sigma);
    return {x, y, z};
}

RigidTransform random_transform(Rng& rng, double max_angle_deg, double max_translation) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point3 axis;
    do {
        const double x = g(rng), y = g(rng), z = g(rng);
        axis = Point3(x, y, z);
    } while (axis.norm() < 1e-12);
    const double angle = u(rng) * max_angle_deg * std::numbers::pi / 180.0;
    std::uniform_real_distribution<double> ut(-max_translation, max_translation);
    const double tx = ut(rng), ty = ut(rng), tz = ut(rng);
    return RigidTransform::from_axis_angle(axis, angle, Point3(tx, ty, tz));
}

void plant(CorrespondenceSet& out, std::vector<std::uint8_t>& labels, std::size_t count, double ratio,
           Provenance provenance, const PointCloud& cloud0, const RigidTransform& gt, double sigma,
           const Point3& outlier_center, double outlier_extent, Rng& rng) {
    const auto inliers = static_cast<std::size_t>(std::llround(static_cast<double>(count) * ratio));
    std::uniform_int_distribution<std::size_t> pick(0, cloud0.size() - 1);
    std::uniform_real_distribution<double> box(-0.5 * outlier_extent, 0.5 * outlier_extent);
    out.clear();
    labels.clear();
    for (std::size_t i = 0; i < count; ++i) {
        Correspondence c;
        const std::size_t idx = pick(rng);
        c.source = cloud0.points[idx];
        c.source_index = static_cast<std::int64_t>(idx);
        c.provenance = provenance;
        c.weight = 1.0;
        if (i < inliers) {
            c.target = gt.apply(c.source) + noise3(rng, sigma);
        } else {
            const double x = box(rng), y = box(rng), z = box(rng);
            c.target = outlier_center + Point3(x, y, z);
        }
        out.push_back(c);
        labels.push_back(i < inliers ? 1 : 0);
    }
    // Joint shuffle so inliers are not clustered at the front.
    for (std::size_t i = count; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> j(0, i - 1);
        const std::size_t k = j(rng);
        std::swap(out[i - 1], out[k]);
        std::swap(labels[i - 1], labels[k]);
    }
}

}  // namespace

PlantedInstance generate_instance(const SynthConfig& cfg) {
    cfg.validate();
    PlantedInstance inst;
    inst.config = cfg;

    Rng scene_rng = make_rng(cfg.rng_seed, 0);
    inst.scene = make_scene(cfg.scene_extent, scene_rng);

    Rng gt_rng = make_rng(cfg.rng_seed, 1);
    inst.gt = random_transform(gt_rng, cfg.gt_rotation_range, cfg.gt_translation_range);

    Rng point_rng = make_rng(cfg.rng_seed, 2);
    std::vector<double> areas;
    for (const auto& p : inst.scene.primitives) areas.push_back(p.area());
    std::discrete_distribution<std::size_t> which(areas.begin(), areas.end());
    inst.cloud0.points.reserve(cfg.num_points);
    for (std::size_t i = 0; i < cfg.num_points; ++i) {
        inst.cloud0.points.push_back(inst.scene.primitives[which(point_rng)].sample(point_rng));
    }

    Rng cloud_rng = make_rng(cfg.rng_seed, 3);
    inst.cloud1.points.reserve(cfg.num_points);
    for (const auto& p : inst.cloud0.points) {
        inst.cloud1.points.push_back(inst.gt.apply(p) + noise3(cloud_rng, cfg.noise_sigma));
    }

    const Point3 outlier_center = inst.gt.apply(inst.scene.center);
    Rng vis_rng = make_rng(cfg.rng_seed, 4);
    plant(inst.c_vis, inst.vis_labels, cfg.visual_count, cfg.visual_inlier_ratio, Provenance::Visual,
          inst.cloud0, inst.gt, cfg.noise_sigma, outlier_center, cfg.outlier_extent, vis_rng);
    Rng geo_rng = make_rng(cfg.rng_seed, 5);
    plant(inst.c_geo, inst.geo_labels, cfg.geo_count, cfg.geo_inlier_ratio, Provenance::Geometric,
          inst.cloud0, inst.gt, cfg.noise_sigma, outlier_center, cfg.outlier_extent, geo_rng);
    return inst;
}

DepthImage render_depth(const Scene& scene, const RigidTransform& pose, const CameraIntrinsics& k,
                        std::size_t width, std::size_t height) {
    k.validate();
    DepthImage img;
    img.width = width;
    img.height = height;
    img.values.assign(width * height, 0);
    const RigidTransform to_scene = pose.inverse();
    const Point3 origin = to_scene.translation();
    for (std::size_t v = 0; v < height; ++v) {
        for (std::size_t u = 0; u < width; ++u) {
            const Point3 ray_cam((static_cast<double>(u) - k.cx) / k.fx, (static_cast<double>(v) - k.cy) / k.fy, 1.0);
            const auto s = scene.intersect(origin, to_scene.rotation() * ray_cam);
            if (!s) continue;
            const double raw = std::round(*s * k.depth_scale);
            if (raw >= 1.0 && raw <= 65535.0) img.values[v * width + u] = static_cast<std::uint16_t>(raw);
        }
    }
    return img;
}

RgbdExport export_rgbd(const PlantedInstance& instance, const RgbdExportConfig& cfg) {
    if (!(cfg.match_inlier_ratio >= 0.0 && cfg.match_inlier_ratio <= 1.0)) {
        throw InvalidArgument("match_inlier_ratio must lie in [0, 1]");
    }
    RgbdExport out;
    out.intrinsics = cfg.intrinsics;
    out.depth0 = render_depth(instance.scene, RigidTransform::identity(), cfg.intrinsics, cfg.width, cfg.height);
    out.depth1 = render_depth(instance.scene, instance.gt, cfg.intrinsics, cfg.width, cfg.height);

    std::vector<std::size_t> valid0, valid1;
    for (std::size_t i = 0; i < out.depth0.values.size(); ++i)
        if (out.depth0.values[i] != 0) valid0.push_back(i);
    for (std::size_t i = 0; i < out.depth1.values.size(); ++i)
        if (out.depth1.values[i] != 0) valid1.push_back(i);
    if (valid0.empty() || valid1.empty()) throw InvalidArgument("rendered depth frames are empty");

    const auto wanted_inliers =
        static_cast<std::size_t>(std::llround(static_cast<double>(cfg.match_count) * cfg.match_inlier_ratio));
    const CameraIntrinsics& k = cfg.intrinsics;
    Rng rng = make_rng(cfg.rng_seed, 17);
    std::uniform_int_distribution<std::size_t> pick0(0, valid0.size() - 1);
    std::uniform_int_distribution<std::size_t> pick1(0, valid1.size() - 1);

    const std::size_t max_attempts = 5000 * std::max<std::size_t>(wanted_inliers, 1);
    for (std::size_t attempt = 0; attempt < max_attempts && out.inlier_matches < wanted_inliers; ++attempt) {
        const std::size_t i0 = valid0[pick0(rng)];
        const double u0 = static_cast<double>(i0 % cfg.width);
        const double v0 = static_cast<double>(i0 / cfg.width);
        const Point3 p = backproject_pixel(u0, v0, out.depth0.values[i0] / k.depth_scale, k);
        const Point3 q = instance.gt.apply(p);
        if (q.z() <= 0.0) continue;
        const Eigen::Vector2d uv = project(q, k);
        const double ru = std::round(uv.x()), rv = std::round(uv.y());
        // Lifting snaps to the pixel grid; keep only projections that land near a
        // pixel center so the exported match stays exact to sub-millimeter level.
        if (std::abs(uv.x() - ru) > 0.05 || std::abs(uv.y() - rv) > 0.05) continue;
        if (ru < 0 || rv < 0 || ru >= static_cast<double>(cfg.width) || rv >= static_cast<double>(cfg.height)) continue;
        const std::uint16_t d1 = out.depth1.at(static_cast<std::size_t>(ru), static_cast<std::size_t>(rv));
        if (d1 == 0 || std::abs(d1 / k.depth_scale - q.z()) > 0.02) continue;  // occluded
        out.matches.push_back({u0, v0, uv.x(), uv.y(), 1.0});
        ++out.inlier_matches;
    }
    const std::size_t outliers = cfg.match_count - std::min(cfg.match_count, wanted_inliers);
    for (std::size_t i = 0; i < outliers; ++i) {
        const std::size_t i0 = valid0[pick0(rng)];
        const std::size_t i1 = valid1[pick1(rng)];
        out.matches.push_back({static_cast<double>(i0 % cfg.width), static_cast<double>(i0 / cfg.width),
                               static_cast<double>(i1 % cfg.width), static_cast<double>(i1 / cfg.width), 0.5});
    }
    return out;
}

}  // namespace vgreg
