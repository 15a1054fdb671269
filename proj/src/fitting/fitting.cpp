#include "vgreg/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vgreg/parallel.hpp"
#include "vgreg/random.hpp"
#include "vgreg/ransac.hpp"

namespace vgreg {

void FittingConfig::validate() const {
    if (num_subsets < 1) throw InvalidArgument("fitting needs num_subsets >= 1");
    if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
        throw InvalidArgument("subset_fraction must lie in (0, 1]");
    }
    if (min_subset_size < 3) throw InvalidArgument("min_subset_size must be >= 3");
    if (!(score_threshold > 0.0)) throw InvalidArgument("score_threshold must be positive");
}

namespace {

struct Candidate {
    bool valid = false;
    RigidTransform transform;
    std::size_t inliers = 0;
};

std::size_t count(const std::vector<std::uint8_t>& mask) {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

}  // namespace

FitResult fit_transform(CorrespondenceView c, const FittingConfig& cfg) {
    FitResult r;
    r.stats = fit_transform(c, cfg, r.transform);
    return r;
}

RegistrationStats fit_transform(CorrespondenceView c, const FittingConfig& cfg, RigidTransform& out) {
    cfg.validate();
    if (c.size() < 3) {
        throw DegenerateInput("fitting needs at least 3 correspondences, got " + std::to_string(c.size()));
    }
    const std::size_t n = c.size();
    const auto by_fraction = static_cast<std::size_t>(std::ceil(cfg.subset_fraction * static_cast<double>(n)));
    const std::size_t m = std::min(n, std::max(cfg.min_subset_size, by_fraction));
    // With m == n every subset is the whole set; one fit suffices.
    const std::size_t subsets = m == n ? 1 : cfg.num_subsets;

    std::vector<Candidate> candidates(subsets);
    parallel_for(subsets, cfg.threads, [&](std::size_t s) {
        CorrespondenceSet subset;
        subset.reserve(m);
        if (m == n) {
            subset.assign(c.begin(), c.end());
        } else {
            Rng rng = make_rng(cfg.rng_seed, s);
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            for (std::size_t i = 0; i < m; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, n - 1);
                std::swap(idx[i], idx[pick(rng)]);
                subset.push_back(c[idx[i]]);
            }
        }
        Candidate cand;
        try {
            cand.transform = weighted_procrustes(subset);
        } catch (const DegenerateInput&) {
            return;
        }
        cand.inliers = count(inlier_mask(c, cand.transform, cfg.score_threshold));
        cand.valid = true;
        candidates[s] = cand;
    });

    RegistrationStats stats;
    stats.subset_size = m;
    stats.subsets_evaluated = subsets;
    const Candidate* best = nullptr;
    for (std::size_t s = 0; s < subsets; ++s) {
        if (!candidates[s].valid) {
            ++stats.degenerate_subsets;
            continue;
        }
        if (!best || candidates[s].inliers > best->inliers) {
            best = &candidates[s];
            stats.best_subset = s;
        }
    }
    if (!best) throw DegenerateInput("every fitting subset was degenerate");

    stats.best_inlier_count = best->inliers;
    stats.best_inlier_mask = inlier_mask(c, best->transform, cfg.score_threshold);
    CorrespondenceSet selected;
    for (std::size_t i = 0; i < n; ++i) {
        if (stats.best_inlier_mask[i]) selected.push_back(c[i]);
    }

    out = best->transform;
    stats.candidate_cost = procrustes_cost(selected, best->transform);
    stats.refit_cost = stats.candidate_cost;
    try {
        const RigidTransform refit = weighted_procrustes(selected);
        const double refit_cost = procrustes_cost(selected, refit);
        // The refit is optimal on `selected`; rounding alone can make it
        // marginally worse, in which case the candidate is kept.
        if (refit_cost <= stats.candidate_cost) {
            out = refit;
            stats.refit_cost = refit_cost;
            stats.refit_applied = true;
        }
    } catch (const DegenerateInput&) {
    }
    stats.final_inlier_count = count(inlier_mask(c, out, cfg.score_threshold));
    return stats;
}

}  // namespace vgreg
