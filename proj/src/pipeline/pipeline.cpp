#include "vgreg/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "vgreg/features.hpp"
#include "vgreg/parallel.hpp"
#include "vgreg/random.hpp"

namespace vgreg {

using io::Json;

PipelineConfig PipelineConfig::resolved() const {
    PipelineConfig r = *this;
    r.threads = resolve_threads(threads);
    r.filter.multiplier = multiplier.value_or(default_multiplier(visual_kind));
    r.ransac.rng_seed = stream_seed(seed, 1);
    r.fitting.rng_seed = stream_seed(seed, 2);
    r.ransac.threads = r.threads;
    r.fitting.threads = r.threads;
    return r;
}

void PipelineConfig::validate() const {
    if (!(voxel_size >= 0.0)) throw InvalidArgument("voxel_size must be >= 0");
    if (fpfh_radius && !(*fpfh_radius > 0.0)) throw InvalidArgument("fpfh_radius must be positive");
    if (!(feature_radius() > 0.0)) throw InvalidArgument("voxel_size 0 needs an explicit fpfh_radius");
    if (normal_neighbors < 3) throw InvalidArgument("normal_neighbors must be >= 3");
    if (!(fpfh_radius_factor > 0.0)) throw InvalidArgument("fpfh_radius_factor must be positive");
    if (ratio_test && !(*ratio_test > 0.0 && *ratio_test <= 1.0)) {
        throw InvalidArgument("ratio_test must lie in (0, 1]");
    }
    if (max_depth && !(*max_depth > 0.0)) throw InvalidArgument("max_depth must be positive");
    const PipelineConfig r = resolved();
    r.ransac.validate();
    r.filter.validate();
    r.fitting.validate();
}

namespace {

template <typename T>
void take(const Json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& scope) {
    const std::set<std::string> keys(known.begin(), known.end());
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw InvalidArgument("unknown config key '" + scope + k + "'");
    }
}

}  // namespace

PipelineConfig apply_config_json(const Json& j, PipelineConfig c) {
    if (!j.is_object()) throw InvalidArgument("pipeline config must be a JSON object");
    reject_unknown(j,
                   {"voxel_size", "normal_neighbors", "fpfh_radius_factor", "fpfh_radius", "ratio_test", "max_depth", "visual_kind",
                    "multiplier", "skip_filter", "seed", "threads", "ransac", "filter", "fitting"},
                   "");
    try {
        take(j, "voxel_size", c.voxel_size);
        take(j, "normal_neighbors", c.normal_neighbors);
        take(j, "fpfh_radius_factor", c.fpfh_radius_factor);
        if (j.contains("fpfh_radius")) {
            c.fpfh_radius = j["fpfh_radius"].is_null() ? std::nullopt : std::optional(j["fpfh_radius"].get<double>());
        }
        if (j.contains("ratio_test")) {
            c.ratio_test = j["ratio_test"].is_null() ? std::nullopt : std::optional(j["ratio_test"].get<double>());
        }
        if (j.contains("max_depth")) {
            c.max_depth = j["max_depth"].is_null() ? std::nullopt : std::optional(j["max_depth"].get<double>());
        }
        if (j.contains("visual_kind")) c.visual_kind = parse_visual_source(j["visual_kind"].get<std::string>());
        if (j.contains("multiplier")) {
            c.multiplier = j["multiplier"].is_null() ? std::nullopt : std::optional(j["multiplier"].get<double>());
        }
        take(j, "skip_filter", c.skip_filter);
        take(j, "seed", c.seed);
        take(j, "threads", c.threads);
        if (j.contains("ransac")) {
            const Json& r = j["ransac"];
            reject_unknown(r, {"inlier_threshold", "max_iterations", "confidence"}, "ransac.");
            take(r, "inlier_threshold", c.ransac.inlier_threshold);
            take(r, "max_iterations", c.ransac.max_iterations);
            take(r, "confidence", c.ransac.confidence);
        }
        if (j.contains("filter")) {
            const Json& f = j["filter"];
            reject_unknown(f,
                           {"confidence", "min_visual_matches", "min_survivor_count", "min_survivor_fraction",
                            "epsilon_floor"},
                           "filter.");
            take(f, "confidence", c.filter.confidence);
            take(f, "min_visual_matches", c.filter.min_visual_matches);
            take(f, "min_survivor_count", c.filter.min_survivor_count);
            take(f, "min_survivor_fraction", c.filter.min_survivor_fraction);
            take(f, "epsilon_floor", c.filter.epsilon_floor);
        }
        if (j.contains("fitting")) {
            const Json& f = j["fitting"];
            reject_unknown(f, {"num_subsets", "subset_fraction", "min_subset_size", "score_threshold"}, "fitting.");
            take(f, "num_subsets", c.fitting.num_subsets);
            take(f, "subset_fraction", c.fitting.subset_fraction);
            take(f, "min_subset_size", c.fitting.min_subset_size);
            take(f, "score_threshold", c.fitting.score_threshold);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad config value: ") + e.what());
    }
    return c;
}

Json config_to_json(const PipelineConfig& c) {
    const PipelineConfig r = c.resolved();
    return Json{
        {"voxel_size", c.voxel_size},
        {"normal_neighbors", c.normal_neighbors},
        {"fpfh_radius_factor", c.fpfh_radius_factor},
        {"fpfh_radius", c.fpfh_radius ? Json(*c.fpfh_radius) : Json(nullptr)},
        {"ratio_test", c.ratio_test ? Json(*c.ratio_test) : Json(nullptr)},
        {"max_depth", c.max_depth ? Json(*c.max_depth) : Json(nullptr)},
        {"visual_kind", std::string(to_string(c.visual_kind))},
        {"multiplier", r.filter.multiplier},
        {"skip_filter", c.skip_filter},
        {"seed", c.seed},
        {"ransac",
         {{"inlier_threshold", c.ransac.inlier_threshold},
          {"max_iterations", c.ransac.max_iterations},
          {"confidence", c.ransac.confidence}}},
        {"filter",
         {{"confidence", c.filter.confidence},
          {"min_visual_matches", c.filter.min_visual_matches},
          {"min_survivor_count", c.filter.min_survivor_count},
          {"min_survivor_fraction", c.filter.min_survivor_fraction},
          {"epsilon_floor", c.filter.epsilon_floor}}},
        {"fitting",
         {{"num_subsets", c.fitting.num_subsets},
          {"subset_fraction", c.fitting.subset_fraction},
          {"min_subset_size", c.fitting.min_subset_size},
          {"score_threshold", c.fitting.score_threshold}}},
    };
}

RegistrationOutcome register_correspondences(CorrespondenceView c_vis, CorrespondenceView c_geo,
                                             const PipelineConfig& cfg) {
    const PipelineConfig r = cfg.resolved();
    RegistrationOutcome out;
    if (r.skip_filter) {
        out.filter.merged = concat(c_vis, c_geo);
        out.filter.geometric_filtered.assign(c_geo.begin(), c_geo.end());
        out.filter.geometric_survivors = c_geo.size();
        out.filter.skip_reason = SkipReason::Disabled;
    } else {
        out.filter = run_filter(c_vis, c_geo, r.ransac, r.filter);
    }
    out.fitting = fit_transform(out.filter.merged, r.fitting, out.transform);
    return out;
}

namespace {

class Stopwatch {
public:
    double lap_ms() {
        const auto now = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
        last_ = now;
        return ms;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

PointCloud prepare_cloud(const PointCloud& raw, const PipelineConfig& cfg, const char* which,
                         FramePairResult& res, Stopwatch& sw) {
    const std::string tag(which);
    PointCloud ds = stage(("downsample_" + tag).c_str(), [&] {
        PointCloud plain;
        plain.points = raw.points;
        return cfg.voxel_size > 0.0 ? voxel_downsample(plain, cfg.voxel_size) : plain;
    });
    res.timings_ms["downsample_" + tag] = sw.lap_ms();
    ds = stage(("normals_" + tag).c_str(),
               [&] { return estimate_normals(ds, cfg.normal_neighbors, Point3::Zero(), cfg.threads); });
    res.timings_ms["normals_" + tag] = sw.lap_ms();
    FpfhResult f = stage(("fpfh_" + tag).c_str(),
                         [&] { return compute_fpfh(ds, cfg.feature_radius(), cfg.threads); });
    res.timings_ms["fpfh_" + tag] = sw.lap_ms();
    ds.descriptors = std::move(f.descriptors);
    res.counts[tag + "_points"] = raw.size();
    res.counts[tag + "_downsampled"] = ds.size();
    res.counts[tag + "_fpfh_empty"] = f.empty_count;
    return ds;
}

}  // namespace

FramePairResult register_frame_pair(const FramePairInputs& in, const PipelineConfig& cfg_in) {
    stage("config", [&] { cfg_in.validate(); return 0; });
    const PipelineConfig cfg = cfg_in.resolved();
    FramePairResult res;
    Stopwatch sw;

    const PointCloud raw0 = in.cloud0 ? *in.cloud0
                                      : stage("backproject_cloud0", [&] {
                                            return backproject(in.depth0, in.intrinsics0, cfg.max_depth);
                                        });
    const PointCloud raw1 = in.cloud1 ? *in.cloud1
                                      : stage("backproject_cloud1", [&] {
                                            return backproject(in.depth1, in.intrinsics1, cfg.max_depth);
                                        });
    res.timings_ms["backproject"] = sw.lap_ms();

    res.cloud0 = prepare_cloud(raw0, cfg, "cloud0", res, sw);
    res.cloud1 = prepare_cloud(raw1, cfg, "cloud1", res, sw);

    res.c_geo = stage("match_features", [&] { return match_features(res.cloud0, res.cloud1, cfg.threads); });
    res.counts["geometric_matches"] = res.c_geo.size();
    if (cfg.ratio_test) {
        res.c_geo = stage("ratio_test", [&] {
            return lowe_ratio_filter(res.c_geo, res.cloud0.descriptors, res.cloud1.descriptors, *cfg.ratio_test,
                                     cfg.threads);
        });
    }
    res.counts["geometric_after_ratio_test"] = res.c_geo.size();
    res.timings_ms["matching"] = sw.lap_ms();

    LiftedMatches lifted = stage("lift_visual_matches", [&] {
        return lift_pixel_matches(in.matches, in.depth0, in.depth1, in.intrinsics0, in.intrinsics1);
    });
    res.c_vis = std::move(lifted.correspondences);
    res.visual_dropped = lifted.dropped;
    res.counts["visual_matches"] = in.matches.size();
    res.counts["visual_lifted"] = res.c_vis.size();
    res.counts["visual_dropped"] = lifted.dropped;
    res.timings_ms["lifting"] = sw.lap_ms();

    res.registration = stage("register", [&] { return register_correspondences(res.c_vis, res.c_geo, cfg); });
    res.timings_ms["filter_and_fit"] = sw.lap_ms();
    return res;
}

namespace {

Json matrix_rows(const RigidTransform& t) { return io::transform_to_json(t)["transform"]; }

}  // namespace

Json make_report(const RegistrationOutcome& r, const PipelineConfig& cfg,
                 const std::map<std::string, std::size_t>& counts, const std::map<std::string, double>& timings_ms) {
    Json rep = io::transform_to_json(r.transform);
    rep["filter_applied"] = r.filter.filter_applied;
    rep["skip_reason"] = std::string(to_string(r.filter.skip_reason));
    if (r.filter.error_model) {
        const ErrorModel& m = *r.filter.error_model;
        rep["error_model"] = {{"sigma_sq_m2", m.sigma_sq},
                              {"t_in_m", m.t_in},
                              {"multiplier", m.multiplier},
                              {"confidence", m.confidence},
                              {"chi2_quantile", m.chi2_quantile},
                              {"epsilon_m", m.epsilon},
                              {"applied_threshold_m", m.applied_threshold},
                              {"assumed_inlier_count", m.assumed_inlier_count}};
    } else {
        rep["error_model"] = nullptr;
    }
    rep["prior_transform"] = r.filter.prior ? matrix_rows(*r.filter.prior) : Json(nullptr);

    Json c = Json::object();
    for (const auto& [k, v] : counts) c[k] = v;
    c["ransac_inliers"] = r.filter.ransac_inliers;
    c["visual_inliers"] = r.filter.visual_inliers;
    c["geometric_survivors"] = r.filter.geometric_survivors;
    c["merged"] = r.filter.merged.size();
    c["fit_inliers"] = r.fitting.final_inlier_count;
    rep["counts"] = c;

    const RegistrationStats& s = r.fitting;
    rep["fitting"] = {{"subset_size", s.subset_size},
                      {"subsets_evaluated", s.subsets_evaluated},
                      {"degenerate_subsets", s.degenerate_subsets},
                      {"best_subset", s.best_subset},
                      {"best_inlier_count", s.best_inlier_count},
                      {"final_inlier_count", s.final_inlier_count},
                      {"candidate_cost", s.candidate_cost},
                      {"refit_cost", s.refit_cost},
                      {"refit_applied", s.refit_applied}};
    rep["config"] = config_to_json(cfg);
    rep["merged_correspondences"] = io::correspondences_to_json(r.filter.merged);
    Json t = Json::object();
    for (const auto& [k, v] : timings_ms) t[k] = v;
    rep["timings_ms"] = t;
    return rep;
}

PairEvaluation evaluate(const RigidTransform& estimate, CorrespondenceView merged, bool filter_applied,
                        const RigidTransform& gt, const PointCloud* cloud0, const PointCloud* cloud1,
                        std::size_t threads) {
    PairEvaluation e;
    e.rotation_error_deg = rotation_error(estimate, gt);
    e.translation_error_cm = translation_error(estimate, gt);
    e.filter_applied = filter_applied;
    if (cloud0 && cloud1) e.chamfer_mm = chamfer_distance(*cloud0, *cloud1, estimate, threads);
    CorrespondenceSet geo;
    for (const auto& c : merged) {
        if (c.provenance == Provenance::Geometric) geo.push_back(c);
    }
    const InlierStats st = correspondence_inlier_stats(geo, gt, kInlierThresholds);
    for (std::size_t k = 0; k < st.thresholds.size(); ++k) {
        e.inlier_ratio_by_threshold[st.thresholds[k]] = st.ratio[k];
        e.inlier_amount_by_threshold[st.thresholds[k]] = st.amount[k];
    }
    return e;
}

PairEvaluation evaluate_report(const Json& report, const RigidTransform& gt, const PointCloud* cloud0,
                               const PointCloud* cloud1, std::size_t threads) {
    try {
        const RigidTransform est = io::transform_from_json(report);
        const CorrespondenceSet merged = io::correspondences_from_json(report.at("merged_correspondences"));
        return evaluate(est, merged, report.at("filter_applied").get<bool>(), gt, cloud0, cloud1, threads);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

Json evaluation_to_json(const PairEvaluation& e) {
    Json inl = Json::array();
    for (const auto& [tau, ratio] : e.inlier_ratio_by_threshold) {
        const auto it = e.inlier_amount_by_threshold.find(tau);
        inl.push_back({{"threshold_m", tau},
                       {"ratio", ratio},
                       {"amount", it == e.inlier_amount_by_threshold.end() ? 0 : it->second}});
    }
    return Json{{"re_deg", e.rotation_error_deg},
                {"te_cm", e.translation_error_cm},
                {"chamfer_mm", e.chamfer_mm ? Json(*e.chamfer_mm) : Json(nullptr)},
                {"filter_applied", e.filter_applied},
                {"inliers", inl}};
}

PairEvaluation evaluation_from_json(const Json& j) {
    try {
        PairEvaluation e;
        e.rotation_error_deg = j.at("re_deg").get<double>();
        e.translation_error_cm = j.at("te_cm").get<double>();
        if (!j.at("chamfer_mm").is_null()) e.chamfer_mm = j["chamfer_mm"].get<double>();
        e.filter_applied = j.at("filter_applied").get<bool>();
        for (const auto& row : j.at("inliers")) {
            const double tau = row.at("threshold_m").get<double>();
            e.inlier_ratio_by_threshold[tau] = row.at("ratio").get<double>();
            e.inlier_amount_by_threshold[tau] = row.at("amount").get<std::size_t>();
        }
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed evaluation: ") + ex.what());
    }
}

namespace {

Json metric_json(const MetricSummary& m, const std::array<double, 3>& cuts) {
    Json acc = Json::array();
    for (std::size_t k = 0; k < 3; ++k) acc.push_back({{"threshold", cuts[k]}, {"accuracy", m.accuracy[k]}});
    return Json{{"mean", m.mean}, {"median", m.median}, {"count", m.count}, {"accuracy", acc}};
}

}  // namespace

Json summary_to_json(const BenchmarkSummary& s) {
    Json ratio = Json::array();
    for (const auto& [tau, r] : s.mean_inlier_ratio) {
        const auto it = s.mean_inlier_amount.find(tau);
        ratio.push_back({{"threshold_m", tau},
                         {"mean_ratio", r},
                         {"mean_amount", it == s.mean_inlier_amount.end() ? 0.0 : it->second}});
    }
    return Json{{"pairs", s.pairs},
                {"filter_recall", s.filter_recall},
                {"rotation_deg", metric_json(s.rotation, s.thresholds.rotation_deg)},
                {"translation_cm", metric_json(s.translation, s.thresholds.translation_cm)},
                {"chamfer_mm", s.chamfer ? metric_json(*s.chamfer, s.thresholds.chamfer_mm) : Json(nullptr)},
                {"inliers", ratio}};
}

namespace {

std::string fmt(double v, int prec = 1) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

std::string cut_label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Renders rows of cells with right-aligned, space-padded columns.
std::string render(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        if (width.size() < r.size()) width.resize(r.size(), 0);
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    std::string out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) line += "  ";
            const std::size_t pad = width[i] - r[i].size();
            if (i == 0) line += r[i] + std::string(pad, ' ');
            else line += std::string(pad, ' ') + r[i];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

void metric_cells(std::vector<std::string>& row, const std::optional<MetricSummary>& m) {
    for (std::size_t k = 0; k < 3; ++k) row.push_back(m ? fmt(100.0 * m->accuracy[k]) : "-");
    row.push_back(m ? fmt(m->mean) : "-");
    row.push_back(m ? fmt(m->median) : "-");
}

}  // namespace

std::string format_summary_table(std::span<const std::pair<std::string, BenchmarkSummary>> rows) {
    const Thresholds th = rows.empty() ? Thresholds{} : rows.front().second.thresholds;
    std::vector<std::vector<std::string>> t;
    t.push_back({"", "Rotation(deg)", "", "", "", "", "Translation(cm)", "", "", "", "", "Chamfer(mm)", "", "", "", ""});
    std::vector<std::string> head{"Method"};
    for (const auto* cuts : {&th.rotation_deg, &th.translation_cm, &th.chamfer_mm}) {
        for (double c : *cuts) head.push_back(cut_label(c));
        head.push_back("Mean");
        head.push_back("Med.");
    }
    t.push_back(head);
    for (const auto& [name, s] : rows) {
        std::vector<std::string> row{name};
        metric_cells(row, s.rotation);
        metric_cells(row, s.translation);
        metric_cells(row, s.chamfer);
        t.push_back(row);
    }
    return render(t);
}

std::string format_k_table(std::span<const std::pair<double, BenchmarkSummary>> rows) {
    const Thresholds th = rows.empty() ? Thresholds{} : rows.front().second.thresholds;
    std::vector<std::vector<std::string>> t;
    t.push_back({"", "Rotation(deg)", "", "", "Translation(cm)", "", "", "Inlier Ratio(%)", "", "", "Filter"});
    std::vector<std::string> head{"K"};
    for (double c : th.rotation_deg) head.push_back(cut_label(c));
    for (double c : th.translation_cm) head.push_back(cut_label(c));
    for (double c : kInlierThresholds) head.push_back(cut_label(100.0 * c));
    head.push_back("Recall");
    t.push_back(head);
    for (const auto& [k, s] : rows) {
        std::vector<std::string> row{cut_label(k)};
        for (double a : s.rotation.accuracy) row.push_back(fmt(100.0 * a));
        for (double a : s.translation.accuracy) row.push_back(fmt(100.0 * a));
        for (double tau : kInlierThresholds) {
            const auto it = s.mean_inlier_ratio.find(tau);
            row.push_back(it == s.mean_inlier_ratio.end() ? "-" : fmt(100.0 * it->second));
        }
        row.push_back(fmt(100.0 * s.filter_recall));
        t.push_back(row);
    }
    return render(t);
}

}  // namespace vgreg
