#pragma once

#include <map>
#include <optional>
#include <string>

#include "vgreg/filter.hpp"
#include "vgreg/fitting.hpp"
#include "vgreg/io.hpp"
#include "vgreg/metrics.hpp"
#include "vgreg/ransac.hpp"
#include "vgreg/rgbd.hpp"

namespace vgreg {

/// Failure inside one pipeline stage; keeps the original kind.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    double voxel_size = 0.025;          // m; 0 keeps every point
    std::size_t normal_neighbors = 30;
    double fpfh_radius_factor = 5.0;    // FPFH radius in voxels
    std::optional<double> fpfh_radius;  // m; overrides the factor
    std::optional<double> ratio_test;   // Lowe threshold on geometric matches
    std::optional<double> max_depth;    // m; pixels beyond are ignored when backprojecting
    VisualSource visual_kind = VisualSource::Learned;
    std::optional<double> multiplier;   // overrides the visual_kind default
    bool skip_filter = false;
    std::uint64_t seed = 0;
    std::size_t threads = 1;            // 0 = hardware concurrency
    RansacConfig ransac;
    FilterConfig filter;
    FittingConfig fitting;

    /// Resolves K, seeds and thread counts into the stage configs.
    PipelineConfig resolved() const;
    double feature_radius() const { return fpfh_radius.value_or(fpfh_radius_factor * voxel_size); }
    void validate() const;
};

/// Layers the keys present in `j` over `base`; unknown keys are rejected.
PipelineConfig apply_config_json(const io::Json& j, PipelineConfig base);
io::Json config_to_json(const PipelineConfig& cfg);

struct RegistrationOutcome {
    RigidTransform transform;
    FilterOutcome filter;
    RegistrationStats fitting;
};

/// Consistency filter (or the union when disabled) followed by randomized
/// weighted Procrustes.
RegistrationOutcome register_correspondences(CorrespondenceView c_vis, CorrespondenceView c_geo,
                                             const PipelineConfig& cfg);

struct FramePairInputs {
    DepthImage depth0, depth1;
    CameraIntrinsics intrinsics0, intrinsics1;
    std::vector<PixelMatch> matches;
    std::optional<PointCloud> cloud0, cloud1;  // replace backprojection when set
};

struct FramePairResult {
    RegistrationOutcome registration;
    PointCloud cloud0, cloud1;      // downsampled, with normals
    std::map<std::string, std::size_t> counts;
    std::map<std::string, double> timings_ms;
    std::size_t visual_dropped = 0;
    CorrespondenceSet c_vis, c_geo;
};

/// Full frame-pair path: clouds, downsampling, normals, FPFH, matching,
/// optional ratio test, lifting of the visual matches, then registration.
FramePairResult register_frame_pair(const FramePairInputs& in, const PipelineConfig& cfg);

/// Report written by `register`. Timings live under `timings_ms` only.
io::Json make_report(const RegistrationOutcome& r, const PipelineConfig& cfg,
                     const std::map<std::string, std::size_t>& counts,
                     const std::map<std::string, double>& timings_ms);

/// Inlier statistics use the geometric correspondences that reached fitting.
PairEvaluation evaluate(const RigidTransform& estimate, CorrespondenceView merged, bool filter_applied,
                        const RigidTransform& gt, const PointCloud* cloud0 = nullptr,
                        const PointCloud* cloud1 = nullptr, std::size_t threads = 1);
PairEvaluation evaluate_report(const io::Json& report, const RigidTransform& gt,
                               const PointCloud* cloud0 = nullptr, const PointCloud* cloud1 = nullptr,
                               std::size_t threads = 1);

io::Json evaluation_to_json(const PairEvaluation& e);
PairEvaluation evaluation_from_json(const io::Json& j);
io::Json summary_to_json(const BenchmarkSummary& s);

/// Plain-text table: rotation, translation and chamfer accuracy at three
/// thresholds plus mean and median for each.
std::string format_summary_table(std::span<const std::pair<std::string, BenchmarkSummary>> rows);

/// Per-K table: accuracies, mean inlier ratio at 10/5/2.5 cm and filter recall.
std::string format_k_table(std::span<const std::pair<double, BenchmarkSummary>> rows);

}  // namespace vgreg
