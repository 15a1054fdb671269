#include "vgreg/ransac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vgreg/kernels.hpp"
#include "vgreg/parallel.hpp"
#include "vgreg/random.hpp"

namespace vgreg {

void RansacConfig::validate() const {
    if (!(inlier_threshold > 0.0)) throw InvalidArgument("RANSAC inlier threshold must be positive");
    if (max_iterations < 1) throw InvalidArgument("RANSAC needs max_iterations >= 1");
    if (sample_size < 3) throw InvalidArgument("RANSAC sample size must be >= 3");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("RANSAC confidence must lie in (0, 1)");
}

bool is_collinear_sample(const Point3& a, const Point3& b, const Point3& c, double min_height) {
    const double twice_area = (b - a).cross(c - a).norm();
    const double longest = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    if (longest == 0.0) return true;
    return twice_area / longest < min_height;
}

std::vector<std::uint8_t> inlier_mask(CorrespondenceView c, const RigidTransform& t, double threshold) {
    const auto res = kernels::residuals_sq(t, c);
    std::vector<std::uint8_t> mask(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) mask[i] = std::sqrt(res[i]) <= threshold ? 1 : 0;
    return mask;
}

namespace {

std::size_t count_inliers(CorrespondenceView c, const RigidTransform& t, double threshold,
                          std::vector<double>& scratch) {
    double r[9];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i * 3 + j] = t.rotation()(i, j);
    const double tr[3] = {t.translation().x(), t.translation().y(), t.translation().z()};
    scratch.resize(c.size());
    kernels::active().residuals_sq(r, tr, c.data(), c.size(), scratch.data());
    std::size_t count = 0;
    for (double d2 : scratch) count += std::sqrt(d2) <= threshold ? 1 : 0;
    return count;
}

struct Hypothesis {
    bool valid = false;
    RigidTransform transform;
    std::size_t inliers = 0;
};

Hypothesis run_iteration(CorrespondenceView c, const RansacConfig& cfg, std::size_t iteration) {
    Rng rng = make_rng(cfg.rng_seed, iteration);
    std::uniform_int_distribution<std::size_t> pick(0, c.size() - 1);
    CorrespondenceSet sample;
    sample.reserve(cfg.sample_size);
    std::vector<std::size_t> chosen;
    chosen.reserve(cfg.sample_size);
    while (chosen.size() < cfg.sample_size) {
        const std::size_t idx = pick(rng);
        if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) continue;
        chosen.push_back(idx);
        Correspondence m = c[idx];
        m.weight = 1.0;
        sample.push_back(m);
    }
    if (is_collinear_sample(sample[0].source, sample[1].source, sample[2].source)) return {};
    Hypothesis h;
    try {
        h.transform = weighted_procrustes(sample);
    } catch (const DegenerateInput&) {
        return {};
    }
    thread_local std::vector<double> scratch;
    h.inliers = count_inliers(c, h.transform, cfg.inlier_threshold, scratch);
    h.valid = true;
    return h;
}

std::size_t required_iterations(std::size_t inliers, std::size_t n, const RansacConfig& cfg) {
    if (inliers == 0) return cfg.max_iterations;
    const double w = static_cast<double>(inliers) / static_cast<double>(n);
    const double all_good = std::pow(w, static_cast<double>(cfg.sample_size));
    if (all_good >= 1.0) return 1;
    const double denom = std::log1p(-all_good);
    if (denom == 0.0) return cfg.max_iterations;
    const double k = std::ceil(std::log(1.0 - cfg.confidence) / denom);
    if (!std::isfinite(k) || k >= static_cast<double>(cfg.max_iterations)) return cfg.max_iterations;
    return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

}  // namespace

RansacResult ransac_transform(CorrespondenceView c, const RansacConfig& cfg) {
    cfg.validate();
    if (c.size() < cfg.sample_size) {
        throw InsufficientCorrespondences("RANSAC needs at least " + std::to_string(cfg.sample_size) +
                                          " correspondences, got " + std::to_string(c.size()));
    }

    Hypothesis best;
    std::size_t done = 0;
    std::size_t limit = cfg.max_iterations;
    std::vector<Hypothesis> block;
    while (done < limit) {
        const std::size_t count = std::min(kRansacBlock, limit - done);
        block.assign(count, Hypothesis{});
        parallel_for(count, cfg.threads, [&](std::size_t k) { block[k] = run_iteration(c, cfg, done + k); });
        for (const Hypothesis& h : block) {
            if (h.valid && (!best.valid || h.inliers > best.inliers)) best = h;
        }
        done += count;
        limit = std::min(cfg.max_iterations, std::max(done, required_iterations(best.inliers, c.size(), cfg)));
    }

    if (!best.valid || best.inliers < cfg.sample_size) {
        throw NoConsensus("RANSAC found no hypothesis with " + std::to_string(cfg.sample_size) +
                          " inliers after " + std::to_string(done) + " iterations");
    }

    RansacResult result;
    result.iterations = done;
    result.transform = best.transform;
    const auto best_mask = inlier_mask(c, best.transform, cfg.inlier_threshold);
    CorrespondenceSet consensus;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (best_mask[i]) {
            Correspondence m = c[i];
            m.weight = 1.0;
            consensus.push_back(m);
        }
    }
    try {
        result.transform = weighted_procrustes(consensus);
    } catch (const DegenerateInput&) {
        // keep the best hypothesis
    }
    result.inlier_mask = inlier_mask(c, result.transform, cfg.inlier_threshold);
    result.inlier_count = static_cast<std::size_t>(
        std::count(result.inlier_mask.begin(), result.inlier_mask.end(), 1));
    return result;
}

}  // namespace vgreg
