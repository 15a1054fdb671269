// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure.
#include <boost/math/special_functions/gamma.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "support.hpp"
#include "vgreg/chi2.hpp"
#include "vgreg/features.hpp"
#include "vgreg/filter.hpp"
#include "vgreg/metrics.hpp"
#include "vgreg/pipeline.hpp"
#include "vgreg/rgbd.hpp"
#include "vgreg/synth.hpp"

using namespace vgreg;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Chi-square CDF through an incomplete gamma implementation that shares no
// code with the library, inverted by plain bisection.
double oracle_cdf(double x, int dof) { return boost::math::gamma_p(0.5 * dof, 0.5 * x); }

double oracle_quantile(double p, int dof) {
    double lo = 0.0, hi = 1.0;
    while (oracle_cdf(hi, dof) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (oracle_cdf(mid, dof) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Verdict chi_square() {
    const double q = chi2_quantile(0.95, 3);
    const double oracle = oracle_quantile(0.95, 3);
    bool ok = std::abs(q - 7.814727903) < 1e-6 && std::abs(q - oracle) < 1e-6;
    Rng rng(101);
    std::uniform_real_distribution<double> up(1e-6, 1 - 1e-6);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double p = up(rng);
        const int dof = 1 + static_cast<int>(rng() % 50);
        worst = std::max(worst, std::abs(oracle_cdf(chi2_quantile(p, dof), dof) - p));
    }
    ok = ok && worst < 1e-9;
    return {ok, fmt("quantile=%.9f oracle=%.9f worst round-trip=%.2e", q, oracle, worst)};
}

SynthConfig planted_config(std::uint64_t seed) {
    SynthConfig cfg;
    cfg.num_points = 2000;
    cfg.geo_count = 1000;
    cfg.geo_inlier_ratio = 0.15;
    cfg.noise_sigma = 0.01;
    cfg.visual_count = 30;
    cfg.visual_inlier_ratio = 0.9;
    cfg.rng_seed = seed;
    return cfg;
}

PipelineConfig pipeline_config(std::uint64_t seed) {
    PipelineConfig cfg;
    cfg.seed = seed;
    return cfg;
}

Verdict variance_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthConfig cfg;
        cfg.num_points = 10;
        cfg.visual_count = 100000;
        cfg.visual_inlier_ratio = 1.0;
        cfg.geo_count = 0;
        cfg.noise_sigma = 0.01;
        cfg.rng_seed = seed;
        const auto inst = generate_instance(cfg);
        worst = std::max(worst, std::abs(estimate_variance(inst.c_vis, inst.gt) / 1e-4 - 1.0));
    }
    const double secs = seconds_since(t0);
    return {worst < 0.03 && secs < 5.0, fmt("worst relative deviation %.4f over 20 seeds, %.2f s", worst, secs)};
}

Verdict design_point() {
    Rng rng(103);
    const auto t = testing::random_transform(rng);
    const double sigma = 0.01;
    const auto c = testing::planted_pairs(rng, t, 100000, sigma);
    const double eps = adaptive_threshold(sigma * sigma, 0.95);
    const double frac = static_cast<double>(filter_geometric(c, t, eps).size()) / static_cast<double>(c.size());
    return {frac >= 0.93 && frac <= 0.97, fmt("retained fraction %.4f at eps %.5f m", frac, eps)};
}

struct PlantedRun {
    PlantedInstance inst;
    RegistrationOutcome reg;
};

PlantedRun run_planted(const SynthConfig& sc, PipelineConfig pc) {
    PlantedRun r{generate_instance(sc), {}};
    r.reg = register_correspondences(r.inst.c_vis, r.inst.c_geo, pc);
    return r;
}

bool registered(const RigidTransform& est, const RigidTransform& gt) {
    return rotation_error(est, gt) <= 1.0 && translation_error(est, gt) <= 2.0;
}

Verdict filtered_purity() {
    const auto t0 = std::chrono::steady_clock::now();
    int good = 0;
    double ratio_sum = 0.0, kept_sum = 0.0;
    const std::array<double, 1> at10{0.10}, at25{0.025};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = run_planted(planted_config(seed), pipeline_config(seed));
        if (!r.reg.filter.filter_applied) continue;
        const auto& kept = r.reg.filter.geometric_filtered;
        const double ratio = correspondence_inlier_stats(kept, r.inst.gt, at10).ratio[0];
        const double kept_true = static_cast<double>(correspondence_inlier_stats(kept, r.inst.gt, at25).amount[0]);
        const double all_true =
            static_cast<double>(correspondence_inlier_stats(r.inst.c_geo, r.inst.gt, at25).amount[0]);
        const double retained = all_true > 0 ? kept_true / all_true : 1.0;
        ratio_sum += ratio;
        kept_sum += retained;
        if (ratio >= 0.90 && retained >= 0.90) ++good;
    }
    const double secs = seconds_since(t0);
    return {good >= 95 && secs < 60.0,
            fmt("%d/100 trials; mean ratio@10cm %.3f, mean retained@2.5cm %.3f, %.1f s", good, ratio_sum / 100,
                kept_sum / 100, secs)};
}

Verdict end_to_end() {
    int with_filter = 0, without = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto sc = planted_config(seed);
        auto pc = pipeline_config(seed);
        const auto inst = generate_instance(sc);
        with_filter += registered(register_correspondences(inst.c_vis, inst.c_geo, pc).transform, inst.gt);
        pc.skip_filter = true;
        without += registered(register_correspondences(inst.c_vis, inst.c_geo, pc).transform, inst.gt);
    }
    return {with_filter >= 95 && without < with_filter,
            fmt("success %d/100 with filter, %d/100 with filter skipped", with_filter, without)};
}

Verdict k_sweep() {
    auto run = [](double k, int& success, double& ratio_sum) {
        const std::array<double, 1> at10{0.10};
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto sc = planted_config(seed);
            sc.visual_inlier_ratio = 0.5;
            auto pc = pipeline_config(seed);
            pc.multiplier = k;
            const auto r = run_planted(sc, pc);
            success += registered(r.reg.transform, r.inst.gt);
            ratio_sum += correspondence_inlier_stats(r.reg.filter.geometric_filtered, r.inst.gt, at10).ratio[0];
        }
    };
    int s1 = 0, s5 = 0, s7 = 0;
    double r1 = 0, r5 = 0, r7 = 0;
    run(1.0, s1, r1);
    run(5.0, s5, r5);
    run(7.0, s7, r7);
    return {s5 >= s1 && r1 >= r7,
            fmt("success K=1 %d, K=5 %d, K=7 %d; mean filtered ratio@10cm K=1 %.4f, K=5 %.4f, K=7 %.4f", s1, s5, s7,
                r1 / 100, r5 / 100, r7 / 100)};
}

Verdict adaptive_direction() {
    auto mean_eps = [](double sigma) {
        double sum = 0.0;
        int n = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            auto sc = planted_config(seed);
            sc.noise_sigma = sigma;
            const auto r = run_planted(sc, pipeline_config(seed));
            if (r.reg.filter.error_model) {
                sum += r.reg.filter.error_model->epsilon;
                ++n;
            }
        }
        return n ? sum / n : 0.0;
    };
    const double noisy = mean_eps(0.02), clean = mean_eps(0.005);
    return {noisy > clean, fmt("mean eps %.4f m at 2 cm noise vs %.4f m at 0.5 cm", noisy, clean)};
}

Verdict skip_guard() {
    bool same = true, reason = true;
    std::vector<PairEvaluation> evals;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto sc = planted_config(seed);
        sc.visual_count = 5;
        const auto inst = generate_instance(sc);
        auto pc = pipeline_config(seed);
        const auto filtered = register_correspondences(inst.c_vis, inst.c_geo, pc);
        pc.skip_filter = true;
        const auto unfiltered = register_correspondences(inst.c_vis, inst.c_geo, pc);
        same = same && filtered.transform == unfiltered.transform &&
               filtered.filter.merged == unfiltered.filter.merged;
        reason = reason && filtered.filter.skip_reason == SkipReason::TooFewVisual;
        evals.push_back(evaluate(filtered.transform, filtered.filter.merged, filtered.filter.filter_applied, inst.gt));
    }
    const double recall = summarize(evals).filter_recall;
    return {same && reason && recall == 0.0,
            fmt("identical to union path: %s; skip_reason too_few_visual: %s; filter recall %.2f", same ? "yes" : "no",
                reason ? "yes" : "no", recall)};
}

Verdict exactness() {
    Rng rng(109);
    double rot = 0.0, tr = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = testing::random_transform(rng);
        const auto c = testing::planted_pairs(rng, t, 50);
        const auto wp = weighted_procrustes(c);
        RansacConfig rc;
        rc.rng_seed = static_cast<std::uint64_t>(trial);
        const auto rs = ransac_transform(c, rc).transform;
        for (const auto& est : {wp, rs}) {
            rot = std::max(rot, testing::rotation_angle_between(est, t));
            tr = std::max(tr, (est.translation() - t.translation()).norm());
        }
    }
    PointCloud a;
    a.points = testing::random_points(rng, 500);
    const double self = chamfer_distance(a, a, RigidTransform::identity());

    const CameraIntrinsics k{525.0, 525.0, 319.5, 239.5, 1000.0};
    DepthImage d{64, 48, std::vector<std::uint16_t>(64 * 48)};
    for (auto& v : d.values) v = static_cast<std::uint16_t>(rng() % 8000);
    const auto cloud = backproject(d, k);
    double px = 0.0;
    std::size_t i = 0;
    for (std::size_t v = 0; v < d.height; ++v)
        for (std::size_t u = 0; u < d.width; ++u)
            if (d.at(u, v) > 0) px = std::max(px, (project(cloud.points[i++], k) - Eigen::Vector2d(u, v)).norm());
    return {rot <= 1e-9 && tr <= 1e-9 && self == 0.0 && px <= 1e-6,
            fmt("rotation %.1e rad, translation %.1e m, self chamfer %g, reprojection %.1e px", rot, tr, self, px)};
}

double dist(const Descriptor& a, const Descriptor& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

Verdict oracle_equivalence() {
    Rng rng(110);
    int mismatches = 0;
    auto size = [&] { return 2 + rng() % 999; };
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        // Descriptor matching and the ratio test.
        const std::size_t ns = size(), nt = size(), dim = 1 + rng() % 33;
        PointCloud s, t;
        for (std::size_t i = 0; i < ns; ++i) {
            s.points.emplace_back(double(i), 0, 0);
            s.descriptors.emplace_back(dim);
            for (auto& v : s.descriptors.back()) v = trial % 2 ? std::floor(3 * u(rng)) : u(rng);
        }
        for (std::size_t j = 0; j < nt; ++j) {
            t.points.emplace_back(0, double(j), 0);
            t.descriptors.emplace_back(dim);
            for (auto& v : t.descriptors.back()) v = trial % 2 ? std::floor(3 * u(rng)) : u(rng);
        }
        const auto m = match_features(s, t);
        const auto kept = lowe_ratio_filter(m, s.descriptors, t.descriptors, 0.8);
        std::size_t next_kept = 0;
        for (std::size_t i = 0; i < ns; ++i) {
            std::size_t best = 0;
            double d1 = dist(s.descriptors[i], t.descriptors[0]), d2 = INFINITY;
            for (std::size_t j = 1; j < nt; ++j) {
                const double d = dist(s.descriptors[i], t.descriptors[j]);
                if (d < d1) {
                    d2 = d1;
                    d1 = d;
                    best = j;
                } else if (d < d2) {
                    d2 = d;
                }
            }
            mismatches += m[i].target_index != static_cast<std::int64_t>(best);
            mismatches += std::abs(m[i].weight - 1.0 / (1.0 + d1)) > 1e-12;
            const double ratio = d2 == 0.0 ? (d1 == 0.0 ? 1.0 : INFINITY) : d1 / d2;
            const bool want = ratio <= 0.8;
            const bool got = next_kept < kept.size() && kept[next_kept].source_index == static_cast<std::int64_t>(i);
            mismatches += want != got;
            next_kept += got;
        }

        // Residual tests, inlier statistics and chamfer.
        const auto gt = testing::random_transform(rng);
        const auto c = testing::planted_pairs(rng, gt, size(), 0.05, 0.4);
        const double eps = 0.2 * u(rng), tin = 0.01 + 0.05 * u(rng), kk = 1.0 + 4.0 * u(rng);
        CorrespondenceSet geo_want, vis_want;
        for (const auto& x : c) {
            const double e = (gt.rotation() * x.source + gt.translation() - x.target).norm();
            if (e <= eps) geo_want.push_back(x);
            if (e <= kk * tin) vis_want.push_back(x);
        }
        mismatches += filter_geometric(c, gt, eps) != geo_want;
        mismatches += assumed_inliers(c, gt, tin, kk) != vis_want;
        const auto stats = correspondence_inlier_stats(c, gt, kInlierThresholds);
        for (std::size_t k = 0; k < kInlierThresholds.size(); ++k) {
            std::size_t n = 0;
            for (const auto& x : c) n += (gt.rotation() * x.source + gt.translation() - x.target).norm() <= kInlierThresholds[k];
            mismatches += stats.amount[k] != n;
        }

        PointCloud a, b;
        a.points = testing::random_points(rng, size());
        b.points = testing::random_points(rng, size());
        double fwd = 0.0, back = 0.0;
        std::vector<Point3> ta;
        for (const auto& p : a.points) ta.push_back(gt.apply(p));
        for (const auto& p : ta) {
            double best = INFINITY;
            for (const auto& q : b.points) best = std::min(best, (p - q).norm());
            fwd += best;
        }
        for (const auto& q : b.points) {
            double best = INFINITY;
            for (const auto& p : ta) best = std::min(best, (p - q).norm());
            back += best;
        }
        const double want = 0.5 * (fwd / ta.size() + back / b.size()) * 1000.0;
        mismatches += std::abs(chamfer_distance(a, b, gt) - want) > 1e-12 * std::max(1.0, want);
    }
    return {mismatches == 0, fmt("%d mismatches over 50 instances of six operations", mismatches)};
}

Verdict determinism() {
    bool same = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto inst = generate_instance(planted_config(seed));
        auto pc = pipeline_config(seed);
        pc.threads = 1;
        const auto a = register_correspondences(inst.c_vis, inst.c_geo, pc);
        const auto b = register_correspondences(inst.c_vis, inst.c_geo, pc);
        pc.threads = 8;
        const auto c = register_correspondences(inst.c_vis, inst.c_geo, pc);
        same = same && a.transform == b.transform && a.transform == c.transform &&
               a.filter.merged == c.filter.merged && a.fitting.best_inlier_mask == c.fitting.best_inlier_mask;
    }

    // Frame-pair path including normals, FPFH and matching.
    auto sc = planted_config(3);
    sc.num_points = 300;
    const auto inst = generate_instance(sc);
    RgbdExportConfig ex;
    ex.width = 160;
    ex.height = 120;
    ex.intrinsics = {131.25, 131.25, 79.5, 59.5, 5000.0};
    ex.match_count = 100;
    ex.match_inlier_ratio = 0.8;
    const auto rgbd = export_rgbd(inst, ex);
    const FramePairInputs in{rgbd.depth0, rgbd.depth1, rgbd.intrinsics, rgbd.intrinsics, rgbd.matches, {}, {}};
    auto pc = pipeline_config(3);
    pc.threads = 1;
    const auto f1 = register_frame_pair(in, pc);
    const auto f1b = register_frame_pair(in, pc);
    pc.threads = 8;
    const auto f8 = register_frame_pair(in, pc);
    const auto report = [&](const FramePairResult& r) {
        return make_report(r.registration, pc, r.counts, {}).dump();
    };
    same = same && report(f1) == report(f1b) && report(f1) == report(f8) && f1.c_geo == f8.c_geo;
    return {same, same ? "bit-identical across repeats and 1 vs 8 threads" : "outputs differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"chi-square quantile and CDF round trip", chi_square},
        {"variance estimator consistency", variance_consistency},
        {"threshold design point", design_point},
        {"filtered geometric purity and recall", filtered_purity},
        {"end-to-end registration beats the unfiltered union", end_to_end},
        {"multiplier sweep direction", k_sweep},
        {"threshold grows with visual noise", adaptive_direction},
        {"skip path equals the union path", skip_guard},
        {"exactness suite", exactness},
        {"oracle equivalence suite", oracle_equivalence},
        {"determinism across repeats and thread counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
