#include "vgreg/neighbor_index.hpp"

#include <algorithm>
#include <queue>
#include <utility>

namespace vgreg {

namespace {

using Entry = std::pair<double, std::size_t>;  // (dist_sq, index), lexicographic

}  // namespace

NeighborIndex::NeighborIndex(std::span<const Point3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / std::max<std::size_t>(leaf_size, 1) + 1);
        build(0, points_.size(), std::max<std::size_t>(leaf_size, 1));
    }
}

std::size_t NeighborIndex::build(std::size_t begin, std::size_t end, std::size_t leaf_size) {
    const std::size_t id = nodes_.size();
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size) return id;

    Point3 lo = points_[order_[begin]], hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) return id;  // all coincident: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];
    const std::size_t left = build(begin, mid, leaf_size);
    const std::size_t right = build(mid, end, leaf_size);
    Node& node = nodes_[id];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
}

std::vector<NeighborIndex::Neighbor> NeighborIndex::knn(const Point3& query, std::size_t k) const {
    k = std::min(k, points_.size());
    std::vector<Neighbor> out;
    if (k == 0) return out;

    std::priority_queue<Entry> heap;  // top = current worst
    auto visit = [&](auto&& self, std::size_t id) -> void {
        const Node& node = nodes_[id];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const Entry e{dist_sq(query, points_[idx]), idx};
                if (heap.size() < k) {
                    heap.push(e);
                } else if (e < heap.top()) {
                    heap.pop();
                    heap.push(e);
                }
            }
            return;
        }
        const double diff = query[node.axis] - node.split;
        const std::size_t near = diff <= 0.0 ? node.left : node.right;
        const std::size_t far = diff <= 0.0 ? node.right : node.left;
        self(self, near);
        if (heap.size() < k || diff * diff <= heap.top().first) self(self, far);
    };
    visit(visit, 0);

    out.resize(heap.size());
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = {heap.top().second, heap.top().first};
        heap.pop();
    }
    return out;
}

std::vector<NeighborIndex::Neighbor> NeighborIndex::radius(const Point3& query, double r) const {
    std::vector<Neighbor> out;
    if (points_.empty() || !(r >= 0.0)) return out;
    const double r2 = r * r;
    auto visit = [&](auto&& self, std::size_t id) -> void {
        const Node& node = nodes_[id];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const double d2 = dist_sq(query, points_[idx]);
                if (d2 <= r2) out.push_back({idx, d2});
            }
            return;
        }
        const double diff = query[node.axis] - node.split;
        const std::size_t near = diff <= 0.0 ? node.left : node.right;
        const std::size_t far = diff <= 0.0 ? node.right : node.left;
        self(self, near);
        if (diff * diff <= r2) self(self, far);
    };
    visit(visit, 0);
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.dist_sq != b.dist_sq ? a.dist_sq < b.dist_sq : a.index < b.index;
    });
    return out;
}

NeighborIndex::Neighbor NeighborIndex::nearest(const Point3& query) const {
    if (points_.empty()) throw EmptyInput("nearest-neighbor query on an empty index");
    return knn(query, 1).front();
}

}  // namespace vgreg
