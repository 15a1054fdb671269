#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg {

/// 3 angular features x 11 bins.
inline constexpr std::size_t kFpfhBinsPerFeature = 11;
inline constexpr std::size_t kFpfhDim = 3 * kFpfhBinsPerFeature;

using Descriptor = std::vector<double>;

/// Per-point normals from the k-NN covariance (k counts the point itself),
/// oriented so that normal . (sensor_origin - point) >= 0. Throws
/// InvalidArgument if k < 3 or the cloud has fewer than k points, and
/// DegenerateInput if some neighborhood is collinear.
PointCloud estimate_normals(const PointCloud& cloud, std::size_t k,
                            const Point3& sensor_origin = Point3::Zero(), std::size_t threads = 1);

/// Darboux-frame features of an oriented point pair, as (theta, alpha, phi):
/// theta in [-pi, pi], alpha and phi in [-1, 1]. All zero for coincident
/// points or a degenerate frame.
Eigen::Vector3d fpfh_pair_features(const Point3& p1, const Point3& n1, const Point3& p2,
                                   const Point3& n2);

struct FpfhResult {
    std::vector<Descriptor> descriptors;
    /// 1 where the point had no neighbor within the radius (descriptor is zero).
    std::vector<std::uint8_t> empty_neighborhood;
    std::size_t empty_count = 0;
};

/// Fast Point Feature Histograms. Each point's simplified histogram (SPFH)
/// collects its radius neighbors' pair features, each 11-bin block scaled to
/// sum to 100. The final descriptor is the point's own SPFH plus the
/// 1/distance-weighted sum of neighbor SPFHs with each block rescaled to 100.
/// Throws InvalidArgument if normals are missing or radius <= 0.
FpfhResult compute_fpfh(const PointCloud& cloud, double radius, std::size_t threads = 1);

/// Weight of a geometric correspondence from its feature distance: 1/(1+d).
inline double descriptor_weight(double feature_distance) { return 1.0 / (1.0 + feature_distance); }

/// One correspondence per source point: its nearest target in descriptor
/// space (ties to the smaller target index), weight from descriptor_weight,
/// provenance geometric. Throws InvalidArgument on missing or mismatched
/// descriptors or an empty target.
CorrespondenceSet match_features(const PointCloud& source, const PointCloud& target,
                                 std::size_t threads = 1);

/// Lowe's ratio test: keeps (p, q) iff D(f_p, f_q) / D(f_p, f_q2) <= threshold
/// where f_q2 is the nearest target descriptor other than q. Both distances
/// zero counts as ratio 1. Correspondences need source_index and
/// target_index. Throws InvalidArgument if threshold is outside (0, 1] or
/// the target has fewer than two descriptors.
CorrespondenceSet lowe_ratio_filter(CorrespondenceView matches,
                                    std::span<const Descriptor> source_descriptors,
                                    std::span<const Descriptor> target_descriptors,
                                    double ratio_threshold, std::size_t threads = 1);

}  // namespace vgreg
