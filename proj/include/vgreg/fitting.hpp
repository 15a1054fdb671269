#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg {

struct FittingConfig {
    std::size_t num_subsets = 100;
    double subset_fraction = 0.1;
    std::size_t min_subset_size = 5;
    double score_threshold = 0.05;  // meters
    std::uint64_t rng_seed = 0;
    std::size_t threads = 1;

    void validate() const;
};

struct RegistrationStats {
    std::size_t subset_size = 0;
    std::size_t subsets_evaluated = 0;
    std::size_t degenerate_subsets = 0;
    std::size_t best_subset = 0;
    std::size_t best_inlier_count = 0;   // of the best candidate, over the full set
    std::size_t final_inlier_count = 0;  // of the refit, over the full set
    double candidate_cost = 0.0;         // best candidate on its own inlier set
    double refit_cost = 0.0;             // refit on the same set
    bool refit_applied = false;
    std::vector<std::uint8_t> best_inlier_mask;
};

/// Randomized weighted Procrustes: fit random subsets (uniform, without
/// replacement, size max(min_subset_size, ceil(fraction * |c|)) capped at
/// |c|), score each by inliers within score_threshold over the whole set,
/// then refit on the winner's inliers with their weights. Throws
/// DegenerateInput if |c| < 3 or every subset is degenerate.
RegistrationStats fit_transform(CorrespondenceView c, const FittingConfig& cfg, RigidTransform& out);

struct FitResult {
    RigidTransform transform;
    RegistrationStats stats;
};

FitResult fit_transform(CorrespondenceView c, const FittingConfig& cfg);

}  // namespace vgreg
