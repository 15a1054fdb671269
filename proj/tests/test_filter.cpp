#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <numbers>

#include "support.hpp"
#include "vgreg/chi2.hpp"
#include "vgreg/filter.hpp"

using namespace vgreg;

namespace {

// Pair whose residual under identity is exactly `e` along x.
Correspondence at_error(double e, Provenance prov = Provenance::Visual) {
    return {Point3(0.5, 0.25, 1.0), Point3(0.5 + e, 0.25, 1.0), 1.0, prov};
}

double boost_quantile(double p, int dof) {
    return boost::math::quantile(boost::math::chi_squared_distribution<double>(dof), p);
}

struct Planted {
    CorrespondenceSet vis, geo;
    std::vector<int> geo_inlier;
};

Planted planted_instance(Rng& rng, const RigidTransform& t, double sigma, std::size_t n_vis,
                         std::size_t geo_in, std::size_t geo_out) {
    Planted out;
    std::normal_distribution<double> g(0.0, sigma);
    auto noisy = [&](Provenance prov) {
        const Point3 p = testing::random_point(rng, 1.5);
        const double a = g(rng), b = g(rng), c = g(rng);
        return Correspondence{p, t.apply(p) + Point3(a, b, c), 1.0, prov};
    };
    for (std::size_t i = 0; i < n_vis; ++i) out.vis.push_back(noisy(Provenance::Visual));
    for (std::size_t i = 0; i < geo_in; ++i) {
        out.geo.push_back(noisy(Provenance::Geometric));
        out.geo_inlier.push_back(1);
    }
    for (std::size_t i = 0; i < geo_out; ++i) {
        out.geo.push_back({testing::random_point(rng, 1.5), t.apply(testing::random_point(rng, 1.5)), 0.5,
                           Provenance::Geometric});
        out.geo_inlier.push_back(0);
    }
    return out;
}

}  // namespace

TEST_CASE("chi-square quantile against an independent gamma implementation") {
    CHECK(chi2_quantile(0.95, 3) == doctest::Approx(7.814727903).epsilon(1e-9));
    CHECK(std::abs(chi2_quantile(0.95, 3) - boost_quantile(0.95, 3)) < 1e-6);
    CHECK(std::abs(chi2_quantile(0.5, 2) - 2.0 * std::numbers::ln2) < 1e-9);

    Rng rng(31);
    std::uniform_real_distribution<double> up(1e-6, 1.0 - 1e-6);
    std::uniform_real_distribution<double> ua(0.1, 40.0), ux(0.0, 60.0);
    for (int i = 0; i < 100; ++i) {
        const double p = up(rng);
        const int dof = 1 + static_cast<int>(rng() % 30);
        const double x = chi2_quantile(p, dof);
        CHECK(std::abs(chi2_cdf(x, dof) - p) < 1e-9);
        CHECK(x == doctest::Approx(boost_quantile(p, dof)).epsilon(1e-10));
        const double a = ua(rng), y = ux(rng);
        CHECK(std::abs(regularized_gamma_p(a, y) - boost::math::gamma_p(a, y)) < 1e-12);
    }
}

TEST_CASE("chi-square quantile rejects bad arguments") {
    CHECK_THROWS_AS(chi2_quantile(0.0, 3), InvalidArgument);
    CHECK_THROWS_AS(chi2_quantile(1.0, 3), InvalidArgument);
    CHECK_THROWS_AS(chi2_quantile(0.5, 0), InvalidArgument);
}

TEST_CASE("distance error") {
    const auto id = RigidTransform::identity();
    CHECK(distance_error(id, {1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(distance_error(id, {0, 0, 0}, {3, 4, 0}) == doctest::Approx(5.0).epsilon(1e-15));
    Rng rng(32);
    for (int i = 0; i < 100; ++i) {
        const auto t = testing::random_transform(rng);
        const Point3 p = testing::random_point(rng), q = testing::random_point(rng);
        Eigen::Vector4d h(p.x(), p.y(), p.z(), 1.0);
        const Eigen::Vector4d m = t.matrix() * h;
        CHECK(distance_error(t, p, q) == doctest::Approx((m.head<3>() - q).norm()).epsilon(1e-12));
    }
}

TEST_CASE("assumed inliers use the scaled bound") {
    const auto id = RigidTransform::identity();
    const CorrespondenceSet c{at_error(0.01), at_error(0.10), at_error(0.20)};
    const auto kept = assumed_inliers(c, id, 0.05, 3.0);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0] == c[0]);
    CHECK(kept[1] == c[1]);
    const CorrespondenceSet exact{at_error(0.0), at_error(0.0)};
    CHECK(assumed_inliers(exact, id, 0.05, 1.0).size() == 2);

    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = testing::random_transform(rng);
        const auto set = testing::planted_pairs(rng, t, 300, 0.05, 0.3);
        const double t_in = 0.02 + 0.01 * trial, k = 1.0 + 0.25 * trial;
        CorrespondenceSet want;
        for (const auto& x : set)
            if ((t.rotation() * x.source + t.translation() - x.target).norm() <= k * t_in) want.push_back(x);
        CHECK(assumed_inliers(set, t, t_in, k) == want);
    }
}

TEST_CASE("variance estimate") {
    const auto id = RigidTransform::identity();
    CHECK(estimate_variance(CorrespondenceSet{at_error(0.0)}, id) == 0.0);
    const CorrespondenceSet two{at_error(std::sqrt(0.03)), at_error(std::sqrt(0.06))};
    CHECK(estimate_variance(two, id) == doctest::Approx(0.015).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_variance(CorrespondenceSet{}, id), EmptyInlierSet);

    Rng rng(34);
    const auto t = testing::random_transform(rng);
    const auto big = testing::planted_pairs(rng, t, 100000, 0.01);
    CHECK(std::abs(estimate_variance(big, t) / 1e-4 - 1.0) < 0.03);
}

TEST_CASE("adaptive threshold") {
    CHECK(adaptive_threshold(0.0) == 0.0);
    CHECK(adaptive_threshold(1e-4) == doctest::Approx(std::sqrt(1e-4 * 7.814727903)).epsilon(1e-9));
    Rng rng(35);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double a = u(rng), b = u(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        CHECK(adaptive_threshold(a) < adaptive_threshold(b));
    }
}

TEST_CASE("geometric consistency test") {
    const auto id = RigidTransform::identity();
    const CorrespondenceSet c{at_error(0.01, Provenance::Geometric), at_error(0.2, Provenance::Geometric)};
    CHECK(filter_geometric(c, id, 0.0).empty());
    CHECK(filter_geometric(c, id, std::numeric_limits<double>::infinity()) == c);

    Rng rng(36);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = testing::random_transform(rng);
        auto set = testing::planted_pairs(rng, t, 400, 0.03, 0.5);
        for (auto& x : set) x.weight = 0.1 + 0.9 * (rng() % 100) / 100.0;
        const double eps = 0.01 * trial;
        CorrespondenceSet want;
        for (const auto& x : set)
            if ((t.rotation() * x.source + t.translation() - x.target).norm() <= eps) want.push_back(x);
        const auto got = filter_geometric(set, t, eps);
        CHECK(got == want);
        // Monotone in the threshold.
        CHECK(filter_geometric(set, t, eps + 0.005).size() >= got.size());
    }
}

TEST_CASE("threshold passes about 95 percent of gaussian residuals") {
    Rng rng(37);
    const double sigma = 0.01;
    const auto t = testing::random_transform(rng);
    const auto c = testing::planted_pairs(rng, t, 100000, sigma);
    const double eps = adaptive_threshold(sigma * sigma, 0.95);
    const double frac = static_cast<double>(filter_geometric(c, t, eps).size()) / c.size();
    CHECK(frac >= 0.93);
    CHECK(frac <= 0.97);
}

TEST_CASE("filter skips on too few visual matches") {
    Rng rng(38);
    const auto t = testing::random_transform(rng);
    const auto p = planted_instance(rng, t, 0.01, 5, 20, 20);
    const auto out = run_filter(p.vis, p.geo, RansacConfig{}, FilterConfig{});
    CHECK_FALSE(out.filter_applied);
    CHECK(out.skip_reason == SkipReason::TooFewVisual);
    CHECK_FALSE(out.error_model.has_value());
    CHECK(out.merged == concat(p.vis, p.geo));
}

TEST_CASE("filter skips when ransac finds no consensus") {
    CorrespondenceSet vis;
    for (int i = 0; i < 12; ++i) vis.push_back({Point3(i, 0, 0), Point3(0, i, 0), 1.0, Provenance::Visual});
    const CorrespondenceSet geo{at_error(0.0, Provenance::Geometric)};
    const auto out = run_filter(vis, geo, RansacConfig{}, FilterConfig{});
    CHECK(out.skip_reason == SkipReason::RansacFailed);
    CHECK(out.merged == concat(vis, geo));
    CHECK_FALSE(out.error_model.has_value());
}

TEST_CASE("filter skips when almost nothing survives") {
    Rng rng(39);
    const auto t = testing::random_transform(rng);
    const auto p = planted_instance(rng, t, 0.01, 30, 3, 500);
    const auto out = run_filter(p.vis, p.geo, RansacConfig{}, FilterConfig{});
    CHECK(out.skip_reason == SkipReason::TooFewSurvivors);
    CHECK(out.merged == concat(p.vis, p.geo));
    CHECK_FALSE(out.error_model.has_value());
}

TEST_CASE("filter on a planted instance") {
    Rng rng(40);
    const auto t = testing::random_transform(rng);
    const auto p = planted_instance(rng, t, 0.01, 30, 150, 850);
    RansacConfig rc;
    rc.rng_seed = 5;
    const auto out = run_filter(p.vis, p.geo, rc, FilterConfig{});
    REQUIRE(out.filter_applied);
    CHECK(out.skip_reason == SkipReason::None);
    REQUIRE(out.error_model.has_value());
    const auto& m = *out.error_model;
    CHECK(std::abs(m.epsilon - std::sqrt(m.sigma_sq * chi2_quantile(0.95, 3))) < 1e-12);
    CHECK(m.assumed_inlier_count == out.visual_inliers);

    std::size_t kept_in = 0, kept_out = 0;
    for (std::size_t i = 0; i < p.geo.size(); ++i) {
        const bool kept = std::find(out.geometric_filtered.begin(), out.geometric_filtered.end(), p.geo[i]) !=
                          out.geometric_filtered.end();
        (p.geo_inlier[i] ? kept_in : kept_out) += kept;
    }
    CHECK(kept_in >= 135);
    CHECK(kept_out <= 8);

    // Merged set is the visual assumed inliers followed by the survivors.
    const auto vis_in = assumed_inliers(p.vis, *out.prior, rc.inlier_threshold, FilterConfig{}.multiplier);
    CHECK(out.merged == concat(vis_in, out.geometric_filtered));
    CHECK(out.geometric_filtered == filter_geometric(p.geo, *out.prior, m.applied_threshold));
    // Never more outliers than the unfiltered union.
    CHECK(kept_out <= 850);
}

TEST_CASE("filter with an empty geometric set") {
    Rng rng(41);
    const auto t = testing::random_transform(rng);
    const auto p = planted_instance(rng, t, 0.01, 30, 0, 0);
    const auto out = run_filter(p.vis, CorrespondenceSet{}, RansacConfig{}, FilterConfig{});
    CHECK(out.filter_applied);
    CHECK(out.merged.size() == out.visual_inliers);
    CHECK(out.merged.size() == 30);
}

TEST_CASE("noise-free visual set uses the threshold floor") {
    Rng rng(42);
    const auto t = testing::random_transform(rng);
    const auto p = planted_instance(rng, t, 0.0, 30, 40, 10);
    const auto out = run_filter(p.vis, p.geo, RansacConfig{}, FilterConfig{});
    REQUIRE(out.error_model.has_value());
    CHECK(out.error_model->epsilon < 1e-6);
    CHECK(out.error_model->applied_threshold == 1e-4);
    CHECK(out.geometric_survivors == 40);
}

TEST_CASE("skipped outcomes always carry the plain union") {
    Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const auto t = testing::random_transform(rng);
        const auto p = planted_instance(rng, t, 0.02, 5 + rng() % 20, rng() % 30, rng() % 300);
        RansacConfig rc;
        rc.rng_seed = trial;
        const auto out = run_filter(p.vis, p.geo, rc, FilterConfig{});
        CHECK(out.filter_applied == (out.skip_reason == SkipReason::None));
        CHECK(out.filter_applied == out.error_model.has_value());
        if (!out.filter_applied) CHECK(out.merged == concat(p.vis, p.geo));
    }
}

TEST_CASE("noisier visual sets give larger thresholds on average") {
    double clean = 0.0, noisy = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(1000 + seed);
        const auto t = testing::random_transform(rng);
        const auto a = planted_instance(rng, t, 0.005, 40, 100, 100);
        const auto b = planted_instance(rng, t, 0.015, 40, 100, 100);
        RansacConfig rc;
        rc.rng_seed = seed;
        const auto oa = run_filter(a.vis, a.geo, rc, FilterConfig{});
        const auto ob = run_filter(b.vis, b.geo, rc, FilterConfig{});
        REQUIRE(oa.error_model.has_value());
        REQUIRE(ob.error_model.has_value());
        clean += oa.error_model->epsilon;
        noisy += ob.error_model->epsilon;
    }
    CHECK(noisy >= clean);
}

TEST_CASE("multiplier defaults and parsing") {
    CHECK(default_multiplier(VisualSource::Learned) == 3.0);
    CHECK(default_multiplier(VisualSource::Handcrafted) == 5.0);
    CHECK(parse_visual_source("learned") == VisualSource::Learned);
    CHECK(parse_visual_source("handcrafted") == VisualSource::Handcrafted);
    CHECK_THROWS_AS(parse_visual_source("magic"), InvalidArgument);
    CHECK(to_string(SkipReason::TooFewSurvivors) == "too_few_survivors");
    FilterConfig f;
    f.multiplier = 0.5;
    CHECK_THROWS_AS(f.validate(), InvalidArgument);
    f = {};
    f.confidence = 1.0;
    CHECK_THROWS_AS(f.validate(), InvalidArgument);
}
