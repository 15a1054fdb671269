#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vgreg/errors.hpp"

namespace vgreg {

using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Matrix4 = Eigen::Matrix4d;

/// Proper rigid motion x -> R x + t. Construction validates that R is
/// orthonormal with det +1 (elementwise tolerance 1e-9).
class RigidTransform {
public:
    static constexpr double kTolerance = 1e-9;

    RigidTransform() = default;

    /// Throws InvalidArgument when `rotation` is not a proper rotation or
    /// any entry is non-finite.
    RigidTransform(const Matrix3& rotation, const Point3& translation);

    static RigidTransform identity() { return {}; }

    /// Accepts a homogeneous matrix whose last row is (0, 0, 0, 1).
    static RigidTransform from_matrix(const Matrix4& m);

    /// Rotation of `angle_rad` about `axis` (need not be unit length).
    static RigidTransform from_axis_angle(const Point3& axis, double angle_rad,
                                          const Point3& translation = Point3::Zero());

    /// Skips validation. For solver output that is proper by construction.
    static RigidTransform unchecked(const Matrix3& rotation, const Point3& translation);

    const Matrix3& rotation() const { return rotation_; }
    const Point3& translation() const { return translation_; }

    Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }
    Matrix4 matrix() const;
    RigidTransform inverse() const;

    /// Rotation angle in radians, in [0, pi].
    double angle() const;

    friend bool operator==(const RigidTransform&, const RigidTransform&) = default;

private:
    Matrix3 rotation_ = Matrix3::Identity();
    Point3 translation_ = Point3::Zero();
};

bool is_proper_rotation(const Matrix3& r, double tol = RigidTransform::kTolerance);

inline Point3 apply_transform(const RigidTransform& t, const Point3& p) { return t.apply(p); }

/// apply(compose(a, b), p) == apply(a, apply(b, p)).
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform inverse(const RigidTransform& t) { return t.inverse(); }

struct PointCloud {
    std::vector<Point3> points;
    std::vector<Point3> normals;                   // empty or |points|
    std::vector<std::vector<double>> descriptors;  // empty or |points|

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_normals() const { return !normals.empty(); }
    bool has_descriptors() const { return !descriptors.empty(); }

    /// Throws InvalidArgument when any PointCloud invariant is violated.
    void validate() const;
};

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& t);

enum class Provenance : std::uint8_t { Visual, Geometric };

const char* to_string(Provenance p);

struct Correspondence {
    static constexpr std::int64_t kNoIndex = -1;

    Point3 source = Point3::Zero();
    Point3 target = Point3::Zero();
    double weight = 1.0;
    Provenance provenance = Provenance::Geometric;
    std::int64_t source_index = kNoIndex;
    std::int64_t target_index = kNoIndex;

    friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

using CorrespondenceSet = std::vector<Correspondence>;
using CorrespondenceView = std::span<const Correspondence>;

/// Multiset union in argument order: all of `a`, then all of `b`.
CorrespondenceSet concat(CorrespondenceView a, CorrespondenceView b);

/// Minimizer over SE(3) of sum_i w_i |T(p_i) - q_i|^2. Throws DegenerateInput
/// with fewer than three pairs, non-positive total weight, or weighted source
/// points that are collinear or coincident.
RigidTransform weighted_procrustes(CorrespondenceView c);

/// Objective of weighted_procrustes evaluated at `t`.
double procrustes_cost(CorrespondenceView c, const RigidTransform& t);

/// Replaces the points of each occupied voxel (key = floor(x / voxel_size)
/// per axis, grid anchored at the origin) with their centroid. Output order
/// follows first occurrence. Normals are averaged and renormalized; descriptors
/// are dropped. Throws InvalidArgument if voxel_size <= 0.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size);

struct VoxelKey {
    std::int64_t x, y, z;
    friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
};

VoxelKey voxel_key(const Point3& p, double voxel_size);

}  // namespace vgreg
