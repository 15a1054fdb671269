#include <algorithm>
#include <cmath>
#include <numbers>

#include "vgreg/features.hpp"
#include "vgreg/neighbor_index.hpp"
#include "vgreg/parallel.hpp"

namespace vgreg {

namespace {

std::size_t bin_of(double value, double lo, double hi) {
    const double scaled = std::floor(kFpfhBinsPerFeature * (value - lo) / (hi - lo));
    const double clamped = std::clamp(scaled, 0.0, static_cast<double>(kFpfhBinsPerFeature - 1));
    return static_cast<std::size_t>(clamped);
}

}  // namespace

Eigen::Vector3d fpfh_pair_features(const Point3& p1, const Point3& n1, const Point3& p2,
                                   const Point3& n2) {
    Point3 delta = p2 - p1;
    const double dist = delta.norm();
    if (dist == 0.0) return Eigen::Vector3d::Zero();

    Point3 source_n = n1, target_n = n2;
    const double angle1 = n1.dot(delta) / dist;
    const double angle2 = n2.dot(delta) / dist;
    double phi = angle1;
    // Source is the endpoint whose normal makes the smaller angle with the
    // connecting line.
    if (std::acos(std::abs(angle1)) > std::acos(std::abs(angle2))) {
        source_n = n2;
        target_n = n1;
        delta = -delta;
        phi = -angle2;
    }
    Point3 v = delta.cross(source_n);
    const double v_norm = v.norm();
    if (v_norm == 0.0) return Eigen::Vector3d::Zero();
    v /= v_norm;
    const Point3 w = source_n.cross(v);
    const double alpha = v.dot(target_n);
    const double theta = std::atan2(w.dot(target_n), source_n.dot(target_n));
    return {theta, alpha, phi};
}

FpfhResult compute_fpfh(const PointCloud& cloud, double radius, std::size_t threads) {
    if (!cloud.has_normals() || cloud.normals.size() != cloud.size()) {
        throw InvalidArgument("FPFH needs a cloud with per-point normals");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("FPFH radius must be positive");

    const std::size_t n = cloud.size();
    const NeighborIndex index(cloud.points);
    std::vector<std::vector<NeighborIndex::Neighbor>> neighbors(n);
    std::vector<Descriptor> spfh(n, Descriptor(kFpfhDim, 0.0));

    parallel_for(n, threads, [&](std::size_t i) {
        auto nbrs = index.radius(cloud.points[i], radius);
        std::erase_if(nbrs, [i](const NeighborIndex::Neighbor& nb) { return nb.index == i; });
        neighbors[i] = std::move(nbrs);
        if (neighbors[i].empty()) return;
        const double increment = 100.0 / static_cast<double>(neighbors[i].size());
        Descriptor& h = spfh[i];
        for (const auto& nb : neighbors[i]) {
            const Eigen::Vector3d f = fpfh_pair_features(cloud.points[i], cloud.normals[i],
                                                         cloud.points[nb.index], cloud.normals[nb.index]);
            h[bin_of(f(0), -std::numbers::pi, std::numbers::pi)] += increment;
            h[kFpfhBinsPerFeature + bin_of(f(1), -1.0, 1.0)] += increment;
            h[2 * kFpfhBinsPerFeature + bin_of(f(2), -1.0, 1.0)] += increment;
        }
    });

    FpfhResult result;
    result.descriptors.assign(n, Descriptor(kFpfhDim, 0.0));
    result.empty_neighborhood.assign(n, 0);

    parallel_for(n, threads, [&](std::size_t i) {
        Descriptor& out = result.descriptors[i];
        if (neighbors[i].empty()) {
            result.empty_neighborhood[i] = 1;
            return;
        }
        double block_sum[3] = {0.0, 0.0, 0.0};
        for (const auto& nb : neighbors[i]) {
            if (nb.dist_sq == 0.0) continue;  // coincident duplicate
            const double weight = 1.0 / std::sqrt(nb.dist_sq);
            const Descriptor& h = spfh[nb.index];
            for (std::size_t b = 0; b < kFpfhDim; ++b) {
                const double v = h[b] * weight;
                out[b] += v;
                block_sum[b / kFpfhBinsPerFeature] += v;
            }
        }
        for (std::size_t b = 0; b < kFpfhDim; ++b) {
            const double s = block_sum[b / kFpfhBinsPerFeature];
            if (s != 0.0) out[b] *= 100.0 / s;
            out[b] += spfh[i][b];
        }
    });

    result.empty_count = static_cast<std::size_t>(
        std::count(result.empty_neighborhood.begin(), result.empty_neighborhood.end(), 1));
    return result;
}

}  // namespace vgreg
