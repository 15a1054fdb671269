#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg {

/// dx*dx + dy*dy + dz*dz, evaluated in that order everywhere distances are
/// compared so that ties resolve identically.
inline double dist_sq(const Point3& a, const Point3& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
}

/// Static kd-tree over 3D points. Results match a linear scan exactly:
/// ordered by (squared distance, index), so equal distances go to the
/// smaller index.
class NeighborIndex {
public:
    struct Neighbor {
        std::size_t index;
        double dist_sq;
        friend bool operator==(const Neighbor&, const Neighbor&) = default;
    };

    NeighborIndex() = default;
    explicit NeighborIndex(std::span<const Point3> points, std::size_t leaf_size = 16);

    std::size_t size() const { return points_.size(); }
    const std::vector<Point3>& points() const { return points_; }

    /// min(k, size()) nearest points.
    std::vector<Neighbor> knn(const Point3& query, std::size_t k) const;

    /// Every point with squared distance <= radius^2.
    std::vector<Neighbor> radius(const Point3& query, double radius) const;

    /// Throws EmptyInput on an empty index.
    Neighbor nearest(const Point3& query) const;

private:
    struct Node {
        std::size_t begin, end;
        int axis = -1;  // -1 marks a leaf
        double split = 0.0;
        std::size_t left = 0, right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end, std::size_t leaf_size);

    std::vector<Point3> points_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace vgreg
