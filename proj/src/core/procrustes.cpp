#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "vgreg/core.hpp"

namespace vgreg {

namespace {

// Relative eigenvalue floor of the weighted source scatter below which the
// points are treated as collinear (or coincident).
constexpr double kRankTolerance = 1e-12;

}  // namespace

RigidTransform weighted_procrustes(CorrespondenceView c) {
    if (c.size() < 3) {
        throw DegenerateInput("weighted Procrustes needs at least 3 correspondences, got " +
                              std::to_string(c.size()));
    }
    double total = 0.0;
    for (const auto& m : c) {
        if (!std::isfinite(m.weight) || m.weight < 0.0) {
            throw DegenerateInput("correspondence weights must be finite and non-negative");
        }
        total += m.weight;
    }
    if (!(total > 0.0)) throw DegenerateInput("total correspondence weight is zero");

    Point3 src_mean = Point3::Zero();
    Point3 dst_mean = Point3::Zero();
    for (const auto& m : c) {
        const double w = m.weight / total;
        src_mean += w * m.source;
        dst_mean += w * m.target;
    }

    Matrix3 cross = Matrix3::Zero();
    Matrix3 scatter = Matrix3::Zero();
    for (const auto& m : c) {
        const double w = m.weight / total;
        const Point3 ps = m.source - src_mean;
        const Point3 qs = m.target - dst_mean;
        cross += w * ps * qs.transpose();
        scatter += w * ps * ps.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Matrix3> eig(scatter, Eigen::EigenvaluesOnly);
    const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
    if (!(lambda(2) > 0.0) || lambda(1) <= kRankTolerance * lambda(2)) {
        throw DegenerateInput("weighted source points are collinear or coincident");
    }

    Eigen::JacobiSVD<Matrix3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix3& u = svd.matrixU();
    const Matrix3& v = svd.matrixV();
    Matrix3 fix = Matrix3::Identity();
    // Reflection: flip the axis paired with the smallest singular value.
    if ((v * u.transpose()).determinant() < 0.0) fix(2, 2) = -1.0;
    const Matrix3 r = v * fix * u.transpose();
    return RigidTransform::unchecked(r, dst_mean - r * src_mean);
}

double procrustes_cost(CorrespondenceView c, const RigidTransform& t) {
    double cost = 0.0;
    for (const auto& m : c) cost += m.weight * (t.apply(m.source) - m.target).squaredNorm();
    return cost;
}

}  // namespace vgreg
