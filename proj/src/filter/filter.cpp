#include "vgreg/filter.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vgreg/chi2.hpp"
#include "vgreg/kernels.hpp"

namespace vgreg {

double default_multiplier(VisualSource source) {
    return source == VisualSource::Learned ? 3.0 : 5.0;
}

std::string_view to_string(VisualSource source) {
    return source == VisualSource::Learned ? "learned" : "handcrafted";
}

VisualSource parse_visual_source(std::string_view text) {
    if (text == "learned") return VisualSource::Learned;
    if (text == "handcrafted") return VisualSource::Handcrafted;
    throw InvalidArgument("visual source must be 'learned' or 'handcrafted', got '" + std::string(text) + "'");
}

std::string_view to_string(SkipReason reason) {
    switch (reason) {
        case SkipReason::None: return "none";
        case SkipReason::TooFewVisual: return "too_few_visual";
        case SkipReason::TooFewSurvivors: return "too_few_survivors";
        case SkipReason::RansacFailed: return "ransac_failed";
        case SkipReason::Disabled: return "disabled";
    }
    return "unknown";
}

void FilterConfig::validate() const {
    if (!(multiplier >= 1.0)) throw InvalidArgument("filter multiplier K must be >= 1");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("filter confidence must lie in (0, 1)");
    if (!(min_survivor_fraction >= 0.0 && min_survivor_fraction <= 1.0)) {
        throw InvalidArgument("min_survivor_fraction must lie in [0, 1]");
    }
    if (!(epsilon_floor >= 0.0)) throw InvalidArgument("epsilon floor must be non-negative");
}

double distance_error(const RigidTransform& t, const Point3& p, const Point3& q) {
    Correspondence c;
    c.source = p;
    c.target = q;
    return std::sqrt(kernels::residuals_sq(t, {&c, 1}, kernels::scalar_table()).front());
}

namespace {

CorrespondenceSet within(CorrespondenceView c, const RigidTransform& t, double bound) {
    const auto res = kernels::residuals_sq(t, c);
    CorrespondenceSet out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::sqrt(res[i]) <= bound) out.push_back(c[i]);
    }
    return out;
}

}  // namespace

CorrespondenceSet assumed_inliers(CorrespondenceView c_vis, const RigidTransform& t, double t_in,
                                  double multiplier) {
    if (!(t_in > 0.0)) throw InvalidArgument("inlier threshold t_in must be positive");
    if (!(multiplier >= 1.0)) throw InvalidArgument("multiplier K must be >= 1");
    return within(c_vis, t, multiplier * t_in);
}

double estimate_variance(CorrespondenceView c_in, const RigidTransform& t) {
    if (c_in.empty()) throw EmptyInlierSet("variance estimate needs at least one assumed inlier");
    const auto res = kernels::residuals_sq(t, c_in);
    double sum = 0.0;
    for (double r : res) sum += r;
    return sum / (3.0 * static_cast<double>(c_in.size()));
}

double adaptive_threshold(double sigma_sq, double confidence) {
    if (!(sigma_sq >= 0.0)) throw InvalidArgument("variance must be non-negative");
    return std::sqrt(sigma_sq * chi2_quantile(confidence, 3));
}

CorrespondenceSet filter_geometric(CorrespondenceView c_geo, const RigidTransform& t, double epsilon) {
    if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
    return within(c_geo, t, epsilon);
}

FilterOutcome run_filter(CorrespondenceView c_vis, CorrespondenceView c_geo,
                         const RansacConfig& ransac_cfg, const FilterConfig& filter_cfg) {
    ransac_cfg.validate();
    filter_cfg.validate();

    FilterOutcome out;
    auto skip = [&](SkipReason reason) {
        out.merged = concat(c_vis, c_geo);
        out.error_model.reset();
        out.filter_applied = false;
        out.skip_reason = reason;
        out.geometric_filtered.assign(c_geo.begin(), c_geo.end());
        out.geometric_survivors = c_geo.size();
        return out;
    };

    if (c_vis.size() < filter_cfg.min_visual_matches) return skip(SkipReason::TooFewVisual);

    RansacResult prior;
    try {
        prior = ransac_transform(c_vis, ransac_cfg);
    } catch (const NoConsensus&) {
        return skip(SkipReason::RansacFailed);
    } catch (const InsufficientCorrespondences&) {
        return skip(SkipReason::RansacFailed);
    }
    out.prior = prior.transform;
    out.ransac_inliers = prior.inlier_count;

    const double t_in = ransac_cfg.inlier_threshold;
    CorrespondenceSet vis_in = assumed_inliers(c_vis, prior.transform, t_in, filter_cfg.multiplier);
    if (vis_in.empty()) return skip(SkipReason::RansacFailed);

    ErrorModel model;
    model.t_in = t_in;
    model.multiplier = filter_cfg.multiplier;
    model.confidence = filter_cfg.confidence;
    model.assumed_inlier_count = vis_in.size();
    model.sigma_sq = estimate_variance(vis_in, prior.transform);
    model.chi2_quantile = chi2_quantile(filter_cfg.confidence, 3);
    model.epsilon = std::sqrt(model.sigma_sq * model.chi2_quantile);
    model.applied_threshold = std::max(model.epsilon, filter_cfg.epsilon_floor);

    CorrespondenceSet geo_in = filter_geometric(c_geo, prior.transform, model.applied_threshold);
    out.visual_inliers = vis_in.size();

    if (!c_geo.empty()) {
        const double needed = std::max(static_cast<double>(filter_cfg.min_survivor_count),
                                       filter_cfg.min_survivor_fraction * static_cast<double>(c_geo.size()));
        if (static_cast<double>(geo_in.size()) < needed) {
            skip(SkipReason::TooFewSurvivors);
            out.visual_inliers = vis_in.size();
            return out;
        }
    }

    out.merged = concat(vis_in, geo_in);
    out.geometric_survivors = geo_in.size();
    out.geometric_filtered = std::move(geo_in);
    out.error_model = model;
    out.filter_applied = true;
    out.skip_reason = SkipReason::None;
    return out;
}

}  // namespace vgreg
