#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg {

struct RansacConfig {
    double inlier_threshold = 0.05;  // t_in, meters
    std::size_t max_iterations = 10000;
    std::size_t sample_size = 3;
    double confidence = 0.999;  // adaptive early exit
    std::uint64_t rng_seed = 0;
    std::size_t threads = 1;

    void validate() const;
};

struct RansacResult {
    RigidTransform transform;
    std::vector<std::uint8_t> inlier_mask;  // |T(p_i) - q_i| <= t_in under `transform`
    std::size_t inlier_count = 0;
    std::size_t iterations = 0;
};

/// Iterations are evaluated in fixed blocks of this size; the early-exit test
/// runs between blocks so the result does not depend on the thread count.
inline constexpr std::size_t kRansacBlock = 64;

/// Hypothesize-and-verify rigid fit with unit weights, followed by a refit on
/// the best consensus set. Throws InsufficientCorrespondences if
/// |c| < sample_size and NoConsensus if no hypothesis gathers sample_size
/// inliers.
RansacResult ransac_transform(CorrespondenceView c, const RansacConfig& cfg);

/// True iff the three points span a triangle whose smallest height is below
/// `min_height` meters.
bool is_collinear_sample(const Point3& a, const Point3& b, const Point3& c, double min_height = 1e-6);

/// Mask of |T(p_i) - q_i| <= threshold, via the active kernel table.
std::vector<std::uint8_t> inlier_mask(CorrespondenceView c, const RigidTransform& t, double threshold);

}  // namespace vgreg
