#include <cmath>
#include <unordered_map>

#include "vgreg/core.hpp"

namespace vgreg {

namespace {

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(k.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.z) + 0x94D049BB133111EBull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

std::int64_t axis_key(double v, double voxel_size) {
    return static_cast<std::int64_t>(std::floor(v / voxel_size));
}

// Rounding in the centroid division can land a hair outside the cell.
double clamp_into_cell(double v, std::int64_t key, double voxel_size) {
    while (axis_key(v, voxel_size) > key) v = std::nextafter(v, -INFINITY);
    while (axis_key(v, voxel_size) < key) v = std::nextafter(v, INFINITY);
    return v;
}

}  // namespace

VoxelKey voxel_key(const Point3& p, double voxel_size) {
    return {axis_key(p.x(), voxel_size), axis_key(p.y(), voxel_size), axis_key(p.z(), voxel_size)};
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel_size) {
    if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
        throw InvalidArgument("voxel_size must be positive, got " + std::to_string(voxel_size));
    }
    struct Cell {
        VoxelKey key;
        Point3 sum = Point3::Zero();
        Point3 normal_sum = Point3::Zero();
        std::size_t count = 0;
    };
    std::unordered_map<VoxelKey, std::size_t, VoxelKeyHash> slots;
    std::vector<Cell> cells;
    slots.reserve(cloud.size());
    const bool with_normals = cloud.has_normals();

    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const VoxelKey key = voxel_key(cloud.points[i], voxel_size);
        auto [it, inserted] = slots.try_emplace(key, cells.size());
        if (inserted) cells.push_back(Cell{key});
        Cell& cell = cells[it->second];
        cell.sum += cloud.points[i];
        if (with_normals) cell.normal_sum += cloud.normals[i];
        ++cell.count;
    }

    PointCloud out;
    out.points.reserve(cells.size());
    for (const Cell& cell : cells) {
        Point3 c = cell.sum / static_cast<double>(cell.count);
        c.x() = clamp_into_cell(c.x(), cell.key.x, voxel_size);
        c.y() = clamp_into_cell(c.y(), cell.key.y, voxel_size);
        c.z() = clamp_into_cell(c.z(), cell.key.z, voxel_size);
        out.points.push_back(c);
        if (with_normals) {
            const double n = cell.normal_sum.norm();
            out.normals.push_back(n > 0.0 ? Point3(cell.normal_sum / n) : Point3(0, 0, 1));
        }
    }
    return out;
}

}  // namespace vgreg
