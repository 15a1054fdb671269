#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg {

/// Geodesic angle between the two rotations, degrees.
double rotation_error(const RigidTransform& est, const RigidTransform& gt);

/// |t_est - t_gt| in centimeters.
double translation_error(const RigidTransform& est, const RigidTransform& gt);

/// Symmetric mean chamfer distance between est(a) and b, millimeters.
/// Throws InvalidArgument if either cloud is empty.
double chamfer_distance(const PointCloud& a, const PointCloud& b, const RigidTransform& est,
                        std::size_t threads = 1);

struct InlierStats {
    std::vector<double> thresholds;  // meters
    std::vector<std::size_t> amount;
    std::vector<double> ratio;       // 0 for an empty set
};

/// Per threshold tau: how many correspondences satisfy |T_gt(p) - q| <= tau.
InlierStats correspondence_inlier_stats(CorrespondenceView c, const RigidTransform& gt,
                                        std::span<const double> thresholds);

/// Standard reporting thresholds: 10 cm, 5 cm, 2.5 cm.
inline constexpr std::array<double, 3> kInlierThresholds{0.10, 0.05, 0.025};

struct PairEvaluation {
    double rotation_error_deg = 0.0;
    double translation_error_cm = 0.0;
    std::optional<double> chamfer_mm;
    std::map<double, double> inlier_ratio_by_threshold;
    std::map<double, std::size_t> inlier_amount_by_threshold;
    bool filter_applied = false;
};

struct Thresholds {
    std::array<double, 3> rotation_deg{5.0, 10.0, 45.0};
    std::array<double, 3> translation_cm{5.0, 10.0, 25.0};
    std::array<double, 3> chamfer_mm{1.0, 5.0, 10.0};
};

struct MetricSummary {
    double mean = 0.0;
    double median = 0.0;  // lower-middle for even counts
    std::array<double, 3> accuracy{};
    std::size_t count = 0;
};

struct BenchmarkSummary {
    Thresholds thresholds;
    MetricSummary rotation;
    MetricSummary translation;
    std::optional<MetricSummary> chamfer;  // absent when no pair has a chamfer value
    double filter_recall = 0.0;
    std::size_t pairs = 0;
    /// Means over pairs, keyed by threshold in meters.
    std::map<double, double> mean_inlier_ratio;
    std::map<double, double> mean_inlier_amount;
};

/// Throws EmptyInput on an empty list.
BenchmarkSummary summarize(std::span<const PairEvaluation> evals, const Thresholds& thresholds = {});

/// Shared by summarize: mean, lower-median and accuracy at `cuts`.
MetricSummary summarize_values(std::vector<double> values, const std::array<double, 3>& cuts);

}  // namespace vgreg
