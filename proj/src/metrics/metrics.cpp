#include "vgreg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vgreg/kernels.hpp"
#include "vgreg/neighbor_index.hpp"
#include "vgreg/parallel.hpp"

namespace vgreg {

double rotation_error(const RigidTransform& est, const RigidTransform& gt) {
    const Matrix3 delta = gt.rotation().transpose() * est.rotation();
    const double c = std::clamp((delta.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

double translation_error(const RigidTransform& est, const RigidTransform& gt) {
    return (est.translation() - gt.translation()).norm() * 100.0;
}

namespace {

double directed_mean(const std::vector<Point3>& from, const NeighborIndex& to, std::size_t threads) {
    std::vector<double> d(from.size());
    parallel_for(from.size(), threads, [&](std::size_t i) { d[i] = std::sqrt(to.nearest(from[i]).dist_sq); });
    double sum = 0.0;
    for (double v : d) sum += v;
    return sum / static_cast<double>(from.size());
}

}  // namespace

double chamfer_distance(const PointCloud& a, const PointCloud& b, const RigidTransform& est,
                        std::size_t threads) {
    if (a.empty() || b.empty()) throw InvalidArgument("chamfer distance needs two non-empty clouds");
    std::vector<Point3> moved;
    moved.reserve(a.size());
    for (const auto& p : a.points) moved.push_back(est.apply(p));
    const NeighborIndex moved_index(moved);
    const NeighborIndex b_index(b.points);
    const double ab = directed_mean(moved, b_index, threads);
    const double ba = directed_mean(b.points, moved_index, threads);
    return 0.5 * (ab + ba) * 1000.0;
}

InlierStats correspondence_inlier_stats(CorrespondenceView c, const RigidTransform& gt,
                                        std::span<const double> thresholds) {
    InlierStats stats;
    stats.thresholds.assign(thresholds.begin(), thresholds.end());
    const auto res = kernels::residuals_sq(gt, c);
    std::vector<double> dist(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) dist[i] = std::sqrt(res[i]);
    for (double tau : thresholds) {
        const auto amount = static_cast<std::size_t>(
            std::count_if(dist.begin(), dist.end(), [tau](double d) { return d <= tau; }));
        stats.amount.push_back(amount);
        stats.ratio.push_back(c.empty() ? 0.0 : static_cast<double>(amount) / static_cast<double>(c.size()));
    }
    return stats;
}

MetricSummary summarize_values(std::vector<double> values, const std::array<double, 3>& cuts) {
    MetricSummary s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const auto hit = std::count_if(values.begin(), values.end(), [&](double v) { return v <= cuts[k]; });
        s.accuracy[k] = static_cast<double>(hit) / static_cast<double>(values.size());
    }
    const std::size_t mid = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    s.median = values[mid];
    return s;
}

BenchmarkSummary summarize(std::span<const PairEvaluation> evals, const Thresholds& thresholds) {
    if (evals.empty()) throw EmptyInput("cannot summarize an empty list of evaluations");
    BenchmarkSummary out;
    out.thresholds = thresholds;
    out.pairs = evals.size();

    std::vector<double> re, te, cd;
    std::size_t applied = 0;
    std::map<double, double> ratio_sum, amount_sum;
    std::map<double, std::size_t> ratio_n, amount_n;
    for (const PairEvaluation& e : evals) {
        re.push_back(e.rotation_error_deg);
        te.push_back(e.translation_error_cm);
        if (e.chamfer_mm) cd.push_back(*e.chamfer_mm);
        if (e.filter_applied) ++applied;
        for (const auto& [tau, r] : e.inlier_ratio_by_threshold) {
            ratio_sum[tau] += r;
            ++ratio_n[tau];
        }
        for (const auto& [tau, a] : e.inlier_amount_by_threshold) {
            amount_sum[tau] += static_cast<double>(a);
            ++amount_n[tau];
        }
    }
    out.rotation = summarize_values(std::move(re), thresholds.rotation_deg);
    out.translation = summarize_values(std::move(te), thresholds.translation_cm);
    if (!cd.empty()) out.chamfer = summarize_values(std::move(cd), thresholds.chamfer_mm);
    out.filter_recall = static_cast<double>(applied) / static_cast<double>(evals.size());
    for (const auto& [tau, s] : ratio_sum) out.mean_inlier_ratio[tau] = s / static_cast<double>(ratio_n[tau]);
    for (const auto& [tau, s] : amount_sum) out.mean_inlier_amount[tau] = s / static_cast<double>(amount_n[tau]);
    return out;
}

}  // namespace vgreg
