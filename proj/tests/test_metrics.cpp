#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "support.hpp"
#include "vgreg/metrics.hpp"

using namespace vgreg;

namespace {

PairEvaluation eval_with(double re, double te = 0.0, bool applied = true) {
    PairEvaluation e;
    e.rotation_error_deg = re;
    e.translation_error_cm = te;
    e.filter_applied = applied;
    return e;
}

PointCloud cloud_of(std::vector<Point3> pts) {
    PointCloud c;
    c.points = std::move(pts);
    return c;
}

double brute_chamfer(const PointCloud& a, const PointCloud& b, const RigidTransform& t) {
    std::vector<Point3> ta;
    for (const auto& p : a.points) ta.push_back(t.apply(p));
    auto directed = [](const std::vector<Point3>& x, const std::vector<Point3>& y) {
        double s = 0.0;
        for (const auto& p : x) {
            double best = INFINITY;
            for (const auto& q : y) best = std::min(best, (p - q).norm());
            s += best;
        }
        return s / x.size();
    };
    return 0.5 * (directed(ta, b.points) + directed(b.points, ta)) * 1000.0;
}

}  // namespace

TEST_CASE("rotation error") {
    const auto id = RigidTransform::identity();
    CHECK(rotation_error(id, id) == 0.0);
    Rng rng(61);
    for (int i = 0; i < 10; ++i) {
        const auto base = testing::random_transform(rng);
        const Point3 axis = testing::random_point(rng);
        const auto turned = compose(base, RigidTransform::from_axis_angle(axis, std::numbers::pi / 2));
        CHECK(rotation_error(turned, base) == doctest::Approx(90.0).epsilon(1e-12));
    }
    for (int i = 0; i < 200; ++i) {
        const auto a = testing::random_transform(rng), b = testing::random_transform(rng);
        const Eigen::Quaterniond q(Matrix3(b.rotation().transpose() * a.rotation()));
        const double oracle = 2.0 * std::atan2(q.vec().norm(), std::abs(q.w())) * 180.0 / std::numbers::pi;
        CHECK(std::abs(rotation_error(a, b) - oracle) < 1e-9);
        CHECK(rotation_error(a, b) == doctest::Approx(rotation_error(b, a)).epsilon(1e-12));
        CHECK(rotation_error(a, b) >= 0.0);
        CHECK(rotation_error(a, b) <= 180.0);
    }
}

TEST_CASE("translation error") {
    const auto id = RigidTransform::identity();
    CHECK(translation_error(id, id) == 0.0);
    const RigidTransform moved(Matrix3::Identity(), {0.03, 0.04, 0.0});
    CHECK(translation_error(moved, id) == doctest::Approx(5.0).epsilon(1e-12));
    Rng rng(62);
    for (int i = 0; i < 100; ++i) {
        const auto a = testing::random_transform(rng), b = testing::random_transform(rng);
        const Point3 d = a.translation() - b.translation();
        CHECK(std::abs(translation_error(a, b) - 100.0 * std::sqrt(d.dot(d))) < 1e-12);
    }
}

TEST_CASE("chamfer distance") {
    CHECK(chamfer_distance(cloud_of({{0, 0, 0}}), cloud_of({{0, 0, 0.001}}), RigidTransform::identity()) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(chamfer_distance(cloud_of({}), cloud_of({{0, 0, 0}}), RigidTransform::identity()),
                    InvalidArgument);

    Rng rng(63);
    const auto a = cloud_of(testing::random_points(rng, 500));
    CHECK(chamfer_distance(a, a, RigidTransform::identity()) == 0.0);
    const auto t = testing::random_transform(rng);
    CHECK(chamfer_distance(a, transform_cloud(a, t), t) < 1e-9);

    for (int trial = 0; trial < 5; ++trial) {
        const auto x = cloud_of(testing::random_points(rng, 500));
        const auto y = cloud_of(testing::random_points(rng, 480));
        const auto est = testing::random_transform(rng, 0.3, 0.2);
        const double want = brute_chamfer(x, y, est);
        CHECK(std::abs(chamfer_distance(x, y, est) - want) < 1e-12 * std::max(1.0, want));
        CHECK(chamfer_distance(x, y, est, 4) == chamfer_distance(x, y, est, 1));

        // Moving both aligned clouds by the same extra motion changes nothing.
        const auto extra = testing::random_transform(rng);
        const double moved = chamfer_distance(x, transform_cloud(y, extra), compose(extra, est));
        CHECK(std::abs(moved - want) < 1e-9);
    }
}

TEST_CASE("inlier stats") {
    const auto id = RigidTransform::identity();
    const std::vector<double> thr{0.025, 0.05, 0.10};
    CorrespondenceSet c;
    for (double e : {0.01, 0.04, 0.20}) c.push_back({Point3(0, 0, 0), Point3(e, 0, 0)});
    const auto s = correspondence_inlier_stats(c, id, thr);
    CHECK(s.amount == std::vector<std::size_t>{1, 2, 2});
    CHECK(s.ratio[1] == doctest::Approx(2.0 / 3.0));

    const auto empty = correspondence_inlier_stats(CorrespondenceSet{}, id, thr);
    CHECK(empty.ratio == std::vector<double>{0, 0, 0});

    Rng rng(64);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = testing::random_transform(rng);
        const auto set = testing::planted_pairs(rng, t, 300, 0.04, 0.3);
        const auto exact = correspondence_inlier_stats(testing::planted_pairs(rng, t, 30), t, thr);
        CHECK(exact.ratio == std::vector<double>{1, 1, 1});
        const auto got = correspondence_inlier_stats(set, t, thr);
        for (std::size_t k = 0; k < thr.size(); ++k) {
            std::size_t n = 0;
            for (const auto& x : set) n += (t.apply(x.source) - x.target).norm() <= thr[k];
            CHECK(got.amount[k] == n);
            CHECK(got.ratio[k] == doctest::Approx(double(n) / set.size()));
            if (k > 0) CHECK(got.amount[k] >= got.amount[k - 1]);
        }
    }
}

TEST_CASE("summarize hand examples") {
    {
        const std::vector<PairEvaluation> one{eval_with(3.0)};
        const auto s = summarize(one);
        CHECK(s.rotation.accuracy[0] == 1.0);
        CHECK(s.rotation.median == 3.0);
        CHECK(s.filter_recall == 1.0);
        CHECK_FALSE(s.chamfer.has_value());
    }
    const std::vector<PairEvaluation> three{eval_with(1, 0, true), eval_with(6, 0, false), eval_with(50, 0, true)};
    const auto s = summarize(three);
    CHECK(s.rotation.accuracy[0] == doctest::Approx(1.0 / 3.0));
    CHECK(s.rotation.accuracy[1] == doctest::Approx(2.0 / 3.0));
    CHECK(s.rotation.accuracy[2] == doctest::Approx(2.0 / 3.0));
    CHECK(s.rotation.mean == doctest::Approx(19.0));
    CHECK(s.rotation.median == 6.0);
    CHECK(s.filter_recall == doctest::Approx(2.0 / 3.0));

    const std::vector<PairEvaluation> four{eval_with(4), eval_with(1), eval_with(3), eval_with(2)};
    CHECK(summarize(four).rotation.median == 2.0);
    CHECK_THROWS_AS(summarize(std::vector<PairEvaluation>{}), EmptyInput);
}

TEST_CASE("summarize matches a streaming recomputation") {
    Rng rng(65);
    std::exponential_distribution<double> ex(0.1);
    std::vector<PairEvaluation> evals(1000);
    for (auto& e : evals) {
        e = eval_with(std::min(180.0, ex(rng)), ex(rng), rng() % 3 != 0);
        if (rng() % 4) e.chamfer_mm = ex(rng);
        for (double t : kInlierThresholds) {
            e.inlier_amount_by_threshold[t] = rng() % 100;
            e.inlier_ratio_by_threshold[t] = (rng() % 1000) / 1000.0;
        }
    }
    const auto s = summarize(evals);

    // Running mean and a counting median, one value at a time.
    auto check_metric = [](const MetricSummary& m, const std::vector<double>& v, const std::array<double, 3>& cuts) {
        double mean = 0.0;
        std::array<std::size_t, 3> hits{};
        for (std::size_t i = 0; i < v.size(); ++i) {
            mean += (v[i] - mean) / double(i + 1);
            for (int k = 0; k < 3; ++k) hits[k] += v[i] <= cuts[k];
        }
        CHECK(m.mean == doctest::Approx(mean).epsilon(1e-12));
        CHECK(m.count == v.size());
        for (int k = 0; k < 3; ++k) {
            CHECK(m.accuracy[k] == doctest::Approx(double(hits[k]) / v.size()));
            if (k > 0) CHECK(m.accuracy[k] >= m.accuracy[k - 1]);
        }
        const std::size_t below = std::count_if(v.begin(), v.end(), [&](double x) { return x < m.median; });
        const std::size_t at_most = std::count_if(v.begin(), v.end(), [&](double x) { return x <= m.median; });
        const std::size_t want = (v.size() - 1) / 2;
        CHECK(below <= want);
        CHECK(at_most > want);
    };
    std::vector<double> re, te, ch;
    std::size_t applied = 0;
    for (const auto& e : evals) {
        re.push_back(e.rotation_error_deg);
        te.push_back(e.translation_error_cm);
        if (e.chamfer_mm) ch.push_back(*e.chamfer_mm);
        applied += e.filter_applied;
    }
    const Thresholds th;
    check_metric(s.rotation, re, th.rotation_deg);
    check_metric(s.translation, te, th.translation_cm);
    REQUIRE(s.chamfer.has_value());
    check_metric(*s.chamfer, ch, th.chamfer_mm);
    CHECK(s.filter_recall == doctest::Approx(double(applied) / evals.size()));
    CHECK(s.pairs == evals.size());
    for (double t : kInlierThresholds) {
        double r = 0.0, a = 0.0;
        for (const auto& e : evals) {
            r += e.inlier_ratio_by_threshold.at(t);
            a += double(e.inlier_amount_by_threshold.at(t));
        }
        CHECK(s.mean_inlier_ratio.at(t) == doctest::Approx(r / evals.size()).epsilon(1e-12));
        CHECK(s.mean_inlier_amount.at(t) == doctest::Approx(a / evals.size()).epsilon(1e-12));
    }
}
