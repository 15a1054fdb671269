#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "vgreg/core.hpp"
#include "vgreg/ransac.hpp"

namespace vgreg {

/// Where the visual correspondences come from; selects the default K.
enum class VisualSource { Learned, Handcrafted };

/// 3 for learned visual matchers, 5 for hand-crafted ones.
double default_multiplier(VisualSource source);

std::string_view to_string(VisualSource source);
VisualSource parse_visual_source(std::string_view text);

/// Residual statistics of the assumed visual inliers under the prior
/// transform.
struct ErrorModel {
    double sigma_sq = 0.0;           // m^2, moment estimate over assumed inliers
    double t_in = 0.0;               // m
    double multiplier = 1.0;         // K
    double confidence = 0.95;
    double chi2_quantile = 0.0;      // chi2_{confidence}(3)
    double epsilon = 0.0;            // sqrt(sigma_sq * chi2_quantile), m
    double applied_threshold = 0.0;  // max(epsilon, floor), used for the geometric test
    std::size_t assumed_inlier_count = 0;
};

struct FilterConfig {
    double multiplier = 3.0;  // K
    double confidence = 0.95;
    std::size_t min_visual_matches = 10;
    std::size_t min_survivor_count = 10;
    double min_survivor_fraction = 0.02;
    /// Lower bound on the geometric threshold so that noise-free visual
    /// residuals (sigma^2 = 0) do not reject everything.
    double epsilon_floor = 1e-4;

    void validate() const;
};

/// `Disabled` marks a caller-requested bypass; run_filter never returns it.
enum class SkipReason { None, TooFewVisual, TooFewSurvivors, RansacFailed, Disabled };

std::string_view to_string(SkipReason reason);

struct FilterOutcome {
    CorrespondenceSet merged;
    std::optional<ErrorModel> error_model;  // present iff filter_applied
    bool filter_applied = false;
    SkipReason skip_reason = SkipReason::None;

    std::optional<RigidTransform> prior;  // RANSAC estimate from the visual set
    std::size_t ransac_inliers = 0;
    std::size_t visual_inliers = 0;        // |C_vis^in|
    std::size_t geometric_survivors = 0;   // |C_geo^in|
    CorrespondenceSet geometric_filtered;  // C_geo^in when the filter ran, else the input C_geo
};

/// |T(p) - q|.
double distance_error(const RigidTransform& t, const Point3& p, const Point3& q);

/// {(p, q) in c_vis : |T(p) - q| <= K * t_in}.
CorrespondenceSet assumed_inliers(CorrespondenceView c_vis, const RigidTransform& t, double t_in,
                                  double multiplier);

/// sum |T(p_i) - q_i|^2 / (3 |c_in|). Throws EmptyInlierSet on an empty set.
double estimate_variance(CorrespondenceView c_in, const RigidTransform& t);

/// sqrt(sigma_sq * chi2_{confidence}(3)).
double adaptive_threshold(double sigma_sq, double confidence = 0.95);

/// {(p, q) in c_geo : |T(p) - q| <= epsilon}, order and fields preserved.
CorrespondenceSet filter_geometric(CorrespondenceView c_geo, const RigidTransform& t, double epsilon);

/// Prior transform from RANSAC on c_vis, error model from the assumed
/// inliers, consistency test on c_geo, multiset merge of both inlier sets.
/// Every failure path degrades to returning concat(c_vis, c_geo) with the
/// matching skip reason.
FilterOutcome run_filter(CorrespondenceView c_vis, CorrespondenceView c_geo,
                         const RansacConfig& ransac_cfg, const FilterConfig& filter_cfg);

}  // namespace vgreg
