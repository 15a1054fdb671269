// Command-line front end: register, synth, eval, bench, ablate-k.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vgreg/io.hpp"
#include "vgreg/parallel.hpp"
#include "vgreg/pipeline.hpp"
#include "vgreg/synth.hpp"

namespace fs = std::filesystem;
using vgreg::io::Json;

namespace {

// Failure while loading or writing a named artifact.
struct CliError : std::runtime_error {
    CliError(std::string stage, const std::string& msg) : std::runtime_error(msg), stage(std::move(stage)) {}
    std::string stage;
};

template <typename Fn>
auto guarded(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const vgreg::Error& e) {
        throw CliError(stage, e.what());
    }
}

constexpr double kSuccessReDeg = 1.0;
constexpr double kSuccessTeCm = 2.0;

// ---- synthetic instance files ----------------------------------------------

Json synth_config_to_json(const vgreg::SynthConfig& c) {
    return Json{{"num_points", c.num_points},
                {"scene_extent", c.scene_extent},
                {"gt_rotation_range", c.gt_rotation_range},
                {"gt_translation_range", c.gt_translation_range},
                {"noise_sigma", c.noise_sigma},
                {"visual_count", c.visual_count},
                {"visual_inlier_ratio", c.visual_inlier_ratio},
                {"geo_count", c.geo_count},
                {"geo_inlier_ratio", c.geo_inlier_ratio},
                {"outlier_extent", c.outlier_extent},
                {"seed", c.rng_seed}};
}

vgreg::SynthConfig synth_config_from_json(const Json& j, vgreg::SynthConfig c = {}) {
    static const std::set<std::string> known{"num_points",    "scene_extent",  "gt_rotation_range",
                                             "gt_translation_range", "noise_sigma", "visual_count",
                                             "visual_inlier_ratio", "geo_count", "geo_inlier_ratio",
                                             "outlier_extent", "seed"};
    for (const auto& [k, v] : j.items()) {
        if (!known.count(k)) throw vgreg::InvalidArgument("unknown synth key '" + k + "'");
    }
    auto take = [&](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    take("num_points", c.num_points);
    take("scene_extent", c.scene_extent);
    take("gt_rotation_range", c.gt_rotation_range);
    take("gt_translation_range", c.gt_translation_range);
    take("noise_sigma", c.noise_sigma);
    take("visual_count", c.visual_count);
    take("visual_inlier_ratio", c.visual_inlier_ratio);
    take("geo_count", c.geo_count);
    take("geo_inlier_ratio", c.geo_inlier_ratio);
    take("outlier_extent", c.outlier_extent);
    take("seed", c.rng_seed);
    c.validate();
    return c;
}

Json labels_json(const std::vector<std::uint8_t>& labels) {
    Json a = Json::array();
    for (auto l : labels) a.push_back(static_cast<int>(l));
    return a;
}

struct InstanceFile {
    vgreg::CorrespondenceSet c_vis, c_geo;
    std::optional<vgreg::RigidTransform> gt;
};

InstanceFile read_instance(const fs::path& path) {
    const Json j = vgreg::io::read_json(path);
    InstanceFile f;
    try {
        f.c_vis = vgreg::io::correspondences_from_json(j.at("visual_correspondences"));
        f.c_geo = vgreg::io::correspondences_from_json(j.at("geometric_correspondences"));
        if (j.contains("gt")) f.gt = vgreg::io::transform_from_json(j.at("gt"));
    } catch (const nlohmann::json::exception& e) {
        throw vgreg::ParseError(path.string() + ": " + e.what());
    }
    return f;
}

// ---- configuration ------------------------------------------------------------

struct PipelineFlags {
    std::string config_path;
    std::string visual_kind;
    std::optional<double> multiplier;
    bool skip_filter = false;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<double> voxel;
    std::optional<double> fpfh_radius;
    std::optional<std::size_t> normal_k;
    std::optional<double> ratio_test;
    std::optional<double> max_depth;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON pipeline config (default: $VGREG_CONFIG)");
        app->add_option("--visual-kind", visual_kind, "Visual feature family, sets the default K")
            ->check(CLI::IsMember({"learned", "handcrafted"}));
        app->add_option("--multiplier,-K", multiplier, "Filter multiplier K (overrides --visual-kind)");
        app->add_flag("--skip-filter", skip_filter, "Fit on the unfiltered union");
        app->add_option("--seed", seed, "RNG seed");
        app->add_option("--threads", threads, "Worker threads (0 = auto)");
        app->add_option("--voxel", voxel, "Voxel size in meters (0 disables downsampling)");
        app->add_option("--fpfh-radius", fpfh_radius, "FPFH radius in meters (default 5 voxels)");
        app->add_option("--normal-k", normal_k, "Neighbors for normal estimation");
        app->add_option("--ratio-test", ratio_test, "Lowe ratio threshold for geometric matches");
        app->add_option("--max-depth", max_depth, "Ignore depth beyond this many meters");
    }

    void overlay(vgreg::PipelineConfig& cfg) const {
        if (!visual_kind.empty()) cfg.visual_kind = vgreg::parse_visual_source(visual_kind);
        if (multiplier) cfg.multiplier = *multiplier;
        if (skip_filter) cfg.skip_filter = true;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (voxel) cfg.voxel_size = *voxel;
        if (fpfh_radius) cfg.fpfh_radius = *fpfh_radius;
        if (normal_k) cfg.normal_neighbors = *normal_k;
        if (ratio_test) cfg.ratio_test = *ratio_test;
        if (max_depth) cfg.max_depth = *max_depth;
    }

    // defaults < config file < flags
    vgreg::PipelineConfig resolve() const {
        vgreg::PipelineConfig cfg;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv("VGREG_CONFIG"); env && *env) path = env;
        }
        if (!path.empty()) {
            cfg = guarded("read_config " + path,
                          [&] { return vgreg::apply_config_json(vgreg::io::read_json(path), cfg); });
        }
        overlay(cfg);
        guarded("config", [&] { cfg.validate(); return 0; });
        return cfg;
    }
};

struct SynthFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> num_points, visual_count, geo_count;
    std::optional<double> visual_inlier_ratio, geo_inlier_ratio, noise, outlier_extent;

    void attach(CLI::App* app, bool with_seed) {
        if (with_seed) app->add_option("--seed", seed, "RNG seed");
        app->add_option("--num-points", num_points, "Points per cloud");
        app->add_option("--visual-count", visual_count, "Visual correspondences");
        app->add_option("--visual-inlier-ratio", visual_inlier_ratio, "Visual inlier ratio");
        app->add_option("--geo-count", geo_count, "Geometric correspondences");
        app->add_option("--geo-inlier-ratio", geo_inlier_ratio, "Geometric inlier ratio");
        app->add_option("--noise", noise, "Per-axis inlier noise sigma in meters");
        app->add_option("--outlier-extent", outlier_extent, "Side of the outlier cube in meters");
    }

    vgreg::SynthConfig apply(vgreg::SynthConfig c) const {
        if (seed) c.rng_seed = *seed;
        if (num_points) c.num_points = *num_points;
        if (visual_count) c.visual_count = *visual_count;
        if (geo_count) c.geo_count = *geo_count;
        if (visual_inlier_ratio) c.visual_inlier_ratio = *visual_inlier_ratio;
        if (geo_inlier_ratio) c.geo_inlier_ratio = *geo_inlier_ratio;
        if (noise) c.noise_sigma = *noise;
        if (outlier_extent) c.outlier_extent = *outlier_extent;
        guarded("synth_config", [&] { c.validate(); return 0; });
        return c;
    }
};

// ---- register ---------------------------------------------------------------

struct RegisterArgs {
    std::string depth0, depth1, intrinsics0, intrinsics1, matches, cloud0, cloud1, instance, out;
    PipelineFlags pipeline;
};

int run_register(const RegisterArgs& a) {
    const vgreg::PipelineConfig cfg = a.pipeline.resolve();
    Json report;
    if (!a.instance.empty()) {
        const InstanceFile inst = guarded("read_instance " + a.instance, [&] { return read_instance(a.instance); });
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = guarded("register", [&] { return vgreg::register_correspondences(inst.c_vis, inst.c_geo, cfg); });
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        report = vgreg::make_report(r, cfg, {{"visual_lifted", inst.c_vis.size()}, {"geometric_matches", inst.c_geo.size()}},
                                    {{"filter_and_fit", ms}});
    } else {
        const std::pair<const char*, const std::string*> required[] = {{"--depth0", &a.depth0},
                                                                       {"--depth1", &a.depth1},
                                                                       {"--intrinsics0", &a.intrinsics0},
                                                                       {"--intrinsics1", &a.intrinsics1},
                                                                       {"--matches", &a.matches}};
        for (const auto& [flag, value] : required) {
            if (value->empty()) throw CliError("arguments", std::string(flag) + " is required without --instance");
        }
        vgreg::FramePairInputs in;
        in.intrinsics0 = guarded("read_intrinsics " + a.intrinsics0, [&] { return vgreg::io::read_intrinsics(a.intrinsics0); });
        in.intrinsics1 = guarded("read_intrinsics " + a.intrinsics1, [&] { return vgreg::io::read_intrinsics(a.intrinsics1); });
        in.depth0 = guarded("read_depth " + a.depth0, [&] { return vgreg::io::read_depth(a.depth0, in.intrinsics0); });
        in.depth1 = guarded("read_depth " + a.depth1, [&] { return vgreg::io::read_depth(a.depth1, in.intrinsics1); });
        in.matches = guarded("read_matches " + a.matches, [&] { return vgreg::io::read_visual_matches(a.matches); });
        if (!a.cloud0.empty()) in.cloud0 = guarded("read_ply " + a.cloud0, [&] { return vgreg::io::read_ply(a.cloud0); });
        if (!a.cloud1.empty()) in.cloud1 = guarded("read_ply " + a.cloud1, [&] { return vgreg::io::read_ply(a.cloud1); });
        vgreg::FramePairResult res;
        try {
            res = vgreg::register_frame_pair(in, cfg);
        } catch (const vgreg::StageError& e) {
            throw CliError(e.stage(), e.what());
        }
        report = vgreg::make_report(res.registration, cfg, res.counts, res.timings_ms);
    }
    guarded("write_report " + a.out, [&] { vgreg::io::write_json(report, a.out); return 0; });
    return 0;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string out_dir;
    bool rgbd = false;
    std::size_t match_count = 300;
    double match_inlier_ratio = 1.0;
    std::size_t width = 640, height = 480;
    SynthFlags synth;
};

int run_synth(const SynthArgs& a) {
    const vgreg::SynthConfig cfg = a.synth.apply({});
    const fs::path dir = a.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError("write_output", "cannot create " + dir.string() + ": " + ec.message());

    const vgreg::PlantedInstance inst = guarded("generate", [&] { return vgreg::generate_instance(cfg); });
    Json j{{"config", synth_config_to_json(cfg)},
           {"gt", vgreg::io::transform_to_json(inst.gt)},
           {"visual_correspondences", vgreg::io::correspondences_to_json(inst.c_vis)},
           {"visual_labels", labels_json(inst.vis_labels)},
           {"geometric_correspondences", vgreg::io::correspondences_to_json(inst.c_geo)},
           {"geometric_labels", labels_json(inst.geo_labels)}};
    guarded("write_output", [&] {
        vgreg::io::write_json(j, dir / "instance.json");
        vgreg::io::write_json(vgreg::io::transform_to_json(inst.gt), dir / "gt.json");
        vgreg::io::write_ply(inst.cloud0, dir / "cloud0.ply");
        vgreg::io::write_ply(inst.cloud1, dir / "cloud1.ply");
        return 0;
    });
    if (a.rgbd) {
        vgreg::RgbdExportConfig ex;
        ex.match_count = a.match_count;
        ex.match_inlier_ratio = a.match_inlier_ratio;
        // Same field of view at any resolution.
        const double scale = static_cast<double>(a.width) / 640.0;
        ex.width = a.width;
        ex.height = a.height;
        ex.intrinsics.fx *= scale;
        ex.intrinsics.fy *= scale;
        ex.intrinsics.cx = (static_cast<double>(a.width) - 1.0) / 2.0;
        ex.intrinsics.cy = (static_cast<double>(a.height) - 1.0) / 2.0;
        ex.rng_seed = cfg.rng_seed;
        const vgreg::RgbdExport out = guarded("render", [&] { return vgreg::export_rgbd(inst, ex); });
        guarded("write_output", [&] {
            vgreg::io::write_depth_pgm(out.depth0, dir / "depth0.pgm");
            vgreg::io::write_depth_pgm(out.depth1, dir / "depth1.pgm");
            vgreg::io::write_intrinsics(out.intrinsics, dir / "intrinsics.json");
            vgreg::io::write_visual_matches(out.matches, dir / "matches.csv");
            return 0;
        });
    }
    return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string report, gt, cloud0, cloud1, out;
    std::size_t threads = 1;
};

int run_eval(const EvalArgs& a) {
    const Json report = guarded("read_report " + a.report, [&] { return vgreg::io::read_json(a.report); });
    const vgreg::RigidTransform gt = guarded("read_gt " + a.gt, [&] { return vgreg::io::read_transform(a.gt); });
    std::optional<vgreg::PointCloud> c0, c1;
    if (!a.cloud0.empty() != !a.cloud1.empty()) throw CliError("arguments", "--cloud0 and --cloud1 go together");
    if (!a.cloud0.empty()) {
        c0 = guarded("read_ply " + a.cloud0, [&] { return vgreg::io::read_ply(a.cloud0); });
        c1 = guarded("read_ply " + a.cloud1, [&] { return vgreg::io::read_ply(a.cloud1); });
    }
    const vgreg::PairEvaluation e = guarded("evaluate", [&] {
        return vgreg::evaluate_report(report, gt, c0 ? &*c0 : nullptr, c1 ? &*c1 : nullptr, a.threads);
    });
    guarded("write_output " + a.out, [&] { vgreg::io::write_json(vgreg::evaluation_to_json(e), a.out); return 0; });
    return 0;
}

// ---- bench ------------------------------------------------------------------

struct PairOutcome {
    std::string name;
    vgreg::PairEvaluation eval;
    std::string skip_reason;
};

PairOutcome run_synthetic_pair(const std::string& name, const vgreg::SynthConfig& sc, const vgreg::PipelineConfig& cfg) {
    const vgreg::PlantedInstance inst = vgreg::generate_instance(sc);
    const auto r = vgreg::register_correspondences(inst.c_vis, inst.c_geo, cfg);
    PairOutcome o;
    o.name = name;
    o.eval = vgreg::evaluate(r.transform, r.filter.merged, r.filter.filter_applied, inst.gt, &inst.cloud0,
                             &inst.cloud1, cfg.threads);
    o.skip_reason = std::string(vgreg::to_string(r.filter.skip_reason));
    return o;
}

PairOutcome run_manifest_pair(const Json& entry, const fs::path& base, const vgreg::PipelineConfig& defaults,
                              std::size_t index) {
    const std::string name = entry.value("name", "pair" + std::to_string(index));
    vgreg::PipelineConfig cfg = defaults;
    if (entry.contains("config")) cfg = vgreg::apply_config_json(entry["config"], cfg);
    cfg.validate();
    if (entry.contains("synth")) return run_synthetic_pair(name, synth_config_from_json(entry["synth"]), cfg);

    auto path = [&](const char* key) { return base / entry.at(key).get<std::string>(); };
    vgreg::FramePairInputs in;
    in.intrinsics0 = vgreg::io::read_intrinsics(path("intrinsics0"));
    in.intrinsics1 = vgreg::io::read_intrinsics(path("intrinsics1"));
    in.depth0 = vgreg::io::read_depth(path("depth0"), in.intrinsics0);
    in.depth1 = vgreg::io::read_depth(path("depth1"), in.intrinsics1);
    in.matches = vgreg::io::read_visual_matches(path("matches"));
    if (entry.contains("cloud0")) in.cloud0 = vgreg::io::read_ply(path("cloud0"));
    if (entry.contains("cloud1")) in.cloud1 = vgreg::io::read_ply(path("cloud1"));
    const vgreg::RigidTransform gt = vgreg::io::read_transform(path("gt"));
    const vgreg::FramePairResult res = vgreg::register_frame_pair(in, cfg);
    const auto& r = res.registration;
    PairOutcome o;
    o.name = name;
    o.eval = vgreg::evaluate(r.transform, r.filter.merged, r.filter.filter_applied, gt, &res.cloud0, &res.cloud1,
                             cfg.threads);
    o.skip_reason = std::string(vgreg::to_string(r.filter.skip_reason));
    return o;
}

std::vector<PairOutcome> run_pairs(std::size_t n, std::size_t threads,
                                   const std::function<PairOutcome(std::size_t)>& fn) {
    std::vector<PairOutcome> out(n);
    // Pairs are independent; each writes its own slot.
    vgreg::parallel_for(n, threads, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CliError("write_output", "cannot write " + path);
    f << text;
}

struct BenchArgs {
    std::string manifest, out, table, name = "ours";
    PipelineFlags pipeline;
};

int run_bench(const BenchArgs& a) {
    vgreg::PipelineConfig cfg = a.pipeline.resolve();
    const Json m = guarded("read_manifest " + a.manifest, [&] { return vgreg::io::read_json(a.manifest); });
    if (m.contains("config")) cfg = guarded("manifest_config", [&] { return vgreg::apply_config_json(m["config"], cfg); });
    // Flags still win over the manifest's config block.
    a.pipeline.overlay(cfg);
    guarded("config", [&] { cfg.validate(); return 0; });
    if (!m.contains("pairs") || !m["pairs"].is_array() || m["pairs"].empty()) {
        throw CliError("read_manifest " + a.manifest, "manifest needs a non-empty 'pairs' array");
    }
    const fs::path base = fs::path(a.manifest).parent_path();
    const std::size_t workers = vgreg::resolve_threads(cfg.threads);
    vgreg::PipelineConfig per_pair = cfg;
    per_pair.threads = 1;
    const auto outcomes = run_pairs(m["pairs"].size(), workers, [&](std::size_t i) {
        return guarded("pair " + std::to_string(i), [&] { return run_manifest_pair(m["pairs"][i], base, per_pair, i); });
    });

    std::vector<vgreg::PairEvaluation> evals;
    Json pairs = Json::array();
    for (const auto& o : outcomes) {
        evals.push_back(o.eval);
        pairs.push_back({{"name", o.name}, {"skip_reason", o.skip_reason}, {"evaluation", vgreg::evaluation_to_json(o.eval)}});
    }
    const vgreg::BenchmarkSummary s = vgreg::summarize(evals);
    guarded("write_output " + a.out, [&] {
        vgreg::io::write_json(Json{{"pairs", pairs}, {"summary", vgreg::summary_to_json(s)}}, a.out);
        return 0;
    });
    if (!a.table.empty()) {
        const std::pair<std::string, vgreg::BenchmarkSummary> row{a.name, s};
        write_text(vgreg::format_summary_table(std::span(&row, 1)), a.table);
    }
    return 0;
}

// ---- ablate-k -----------------------------------------------------------------

struct AblateArgs {
    std::string k_values = "1,3,5,7", out, table;
    std::size_t seeds = 100;
    std::uint64_t first_seed = 0;
    SynthFlags synth;
    PipelineFlags pipeline;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw CliError("arguments", "bad K value '" + tok + "'");
        }
    }
    if (out.empty()) throw CliError("arguments", "--k-values is empty");
    return out;
}

int run_ablate(const AblateArgs& a) {
    const std::vector<double> ks = parse_list(a.k_values);
    const vgreg::PipelineConfig base = a.pipeline.resolve();
    const vgreg::SynthConfig synth_base = a.synth.apply({});
    const std::size_t workers = vgreg::resolve_threads(base.threads);

    Json rows = Json::array();
    std::vector<std::pair<double, vgreg::BenchmarkSummary>> table;
    for (double k : ks) {
        vgreg::PipelineConfig cfg = base;
        cfg.multiplier = k;
        cfg.threads = 1;
        guarded("config", [&] { cfg.validate(); return 0; });
        const auto outcomes = run_pairs(a.seeds, workers, [&](std::size_t i) {
            vgreg::SynthConfig sc = synth_base;
            sc.rng_seed = a.first_seed + i;
            vgreg::PipelineConfig c = cfg;
            c.seed = a.first_seed + i;
            return guarded("seed " + std::to_string(sc.rng_seed), [&] { return run_synthetic_pair("", sc, c); });
        });
        std::vector<vgreg::PairEvaluation> evals;
        std::size_t success = 0;
        for (const auto& o : outcomes) {
            evals.push_back(o.eval);
            if (o.eval.rotation_error_deg <= kSuccessReDeg && o.eval.translation_error_cm <= kSuccessTeCm) ++success;
        }
        const auto s = vgreg::summarize(evals);
        table.emplace_back(k, s);
        rows.push_back({{"k", k},
                        {"summary", vgreg::summary_to_json(s)},
                        {"success", {{"re_deg", kSuccessReDeg},
                                     {"te_cm", kSuccessTeCm},
                                     {"rate", static_cast<double>(success) / static_cast<double>(a.seeds)}}}});
    }
    const std::string text = vgreg::format_k_table(table);
    if (!a.out.empty()) {
        guarded("write_output " + a.out, [&] {
            vgreg::io::write_json(Json{{"synth", synth_config_to_json(synth_base)}, {"seeds", a.seeds}, {"rows", rows}}, a.out);
            return 0;
        });
    }
    if (!a.table.empty()) write_text(text, a.table);
    if (a.out.empty() && a.table.empty()) std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RGB-D pair registration combining visual and geometric correspondences"};
    app.require_subcommand(1);

    RegisterArgs reg;
    auto* r = app.add_subcommand("register", "Register a frame pair or a planted instance");
    r->add_option("--depth0", reg.depth0, "Source depth (.pgm or .bin)");
    r->add_option("--depth1", reg.depth1, "Target depth (.pgm or .bin)");
    r->add_option("--intrinsics0", reg.intrinsics0, "Source intrinsics JSON");
    r->add_option("--intrinsics1", reg.intrinsics1, "Target intrinsics JSON");
    r->add_option("--matches", reg.matches, "Visual match CSV");
    r->add_option("--cloud0", reg.cloud0, "Source cloud PLY (replaces backprojection)");
    r->add_option("--cloud1", reg.cloud1, "Target cloud PLY (replaces backprojection)");
    r->add_option("--instance", reg.instance, "Planted instance JSON from `synth`");
    r->add_option("--out", reg.out, "Report JSON")->required();
    reg.pipeline.attach(r);

    SynthArgs syn;
    auto* s = app.add_subcommand("synth", "Write a planted instance");
    s->add_option("--out-dir", syn.out_dir, "Output directory")->required();
    s->add_flag("--rgbd", syn.rgbd, "Also render depth frames, intrinsics and a match CSV");
    s->add_option("--match-count", syn.match_count, "Pixel matches with --rgbd");
    s->add_option("--match-inlier-ratio", syn.match_inlier_ratio, "Fraction of correct pixel matches");
    s->add_option("--width", syn.width, "Rendered image width")->check(CLI::PositiveNumber);
    s->add_option("--height", syn.height, "Rendered image height")->check(CLI::PositiveNumber);
    syn.synth.attach(s, true);

    EvalArgs ev;
    auto* e = app.add_subcommand("eval", "Score a report against a ground-truth transform");
    e->add_option("--report", ev.report, "Report JSON from `register`")->required();
    e->add_option("--gt", ev.gt, "Ground-truth transform JSON")->required();
    e->add_option("--cloud0", ev.cloud0, "Source cloud PLY for chamfer");
    e->add_option("--cloud1", ev.cloud1, "Target cloud PLY for chamfer");
    e->add_option("--out", ev.out, "Evaluation JSON")->required();
    e->add_option("--threads", ev.threads, "Worker threads (0 = auto)");

    BenchArgs be;
    auto* b = app.add_subcommand("bench", "Run a manifest of pairs and summarize");
    b->add_option("--manifest", be.manifest, "Manifest JSON")->required();
    b->add_option("--out", be.out, "Summary JSON")->required();
    b->add_option("--table", be.table, "Plain-text table");
    b->add_option("--name", be.name, "Row label in the table");
    be.pipeline.attach(b);

    AblateArgs ab;
    auto* k = app.add_subcommand("ablate-k", "Sweep the filter multiplier on planted instances");
    k->add_option("--k-values", ab.k_values, "Comma-separated K values");
    k->add_option("--seeds", ab.seeds, "Instances per K")->check(CLI::PositiveNumber);
    k->add_option("--first-seed", ab.first_seed, "Seed of the first instance");
    k->add_option("--out", ab.out, "Rows JSON");
    k->add_option("--table", ab.table, "Plain-text table");
    ab.synth.attach(k, false);
    ab.pipeline.attach(k);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*r) return run_register(reg);
        if (*s) return run_synth(syn);
        if (*e) return run_eval(ev);
        if (*b) return run_bench(be);
        if (*k) return run_ablate(ab);
    } catch (const CliError& err) {
        std::cerr << "error [" << err.stage << "]: " << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
    return 1;
}
