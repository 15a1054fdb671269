#include <Eigen/Eigenvalues>

#include "vgreg/features.hpp"
#include "vgreg/neighbor_index.hpp"
#include "vgreg/parallel.hpp"

namespace vgreg {

PointCloud estimate_normals(const PointCloud& cloud, std::size_t k, const Point3& sensor_origin,
                            std::size_t threads) {
    if (k < 3) throw InvalidArgument("normal estimation needs k >= 3");
    if (cloud.size() < k) {
        throw InvalidArgument("normal estimation needs at least k = " + std::to_string(k) +
                              " points, cloud has " + std::to_string(cloud.size()));
    }
    const NeighborIndex index(cloud.points);
    PointCloud out = cloud;
    out.normals.assign(cloud.size(), Point3::Zero());
    std::vector<std::uint8_t> degenerate(cloud.size(), 0);

    parallel_for(cloud.size(), threads, [&](std::size_t i) {
        const auto nbrs = index.knn(cloud.points[i], k);
        Point3 mean = Point3::Zero();
        for (const auto& n : nbrs) mean += cloud.points[n.index];
        mean /= static_cast<double>(nbrs.size());
        Matrix3 cov = Matrix3::Zero();
        for (const auto& n : nbrs) {
            const Point3 d = cloud.points[n.index] - mean;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Matrix3> eig(cov);
        const Eigen::Vector3d lambda = eig.eigenvalues();
        if (!(lambda(2) > 0.0) || lambda(1) <= 1e-12 * lambda(2)) {
            degenerate[i] = 1;
            return;
        }
        Point3 normal = eig.eigenvectors().col(0).normalized();
        if (normal.dot(sensor_origin - cloud.points[i]) < 0.0) normal = -normal;
        out.normals[i] = normal;
    });

    for (std::size_t i = 0; i < degenerate.size(); ++i) {
        if (degenerate[i]) {
            throw DegenerateInput("neighborhood of point " + std::to_string(i) +
                                  " is collinear; normal undefined");
        }
    }
    return out;
}

}  // namespace vgreg
