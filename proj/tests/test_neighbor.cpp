#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "vgreg/neighbor_index.hpp"

using namespace vgreg;
using Neighbor = NeighborIndex::Neighbor;

namespace {

std::vector<Neighbor> brute_sorted(const std::vector<Point3>& pts, const Point3& q) {
    std::vector<Neighbor> all;
    for (std::size_t i = 0; i < pts.size(); ++i) all.push_back({i, dist_sq(pts[i], q)});
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.dist_sq != b.dist_sq ? a.dist_sq < b.dist_sq : a.index < b.index;
    });
    return all;
}

// Points on a coarse lattice produce many exact distance ties.
std::vector<Point3> lattice_points(Rng& rng, std::size_t n) {
    std::uniform_int_distribution<int> u(-3, 3);
    std::vector<Point3> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const int x = u(rng), y = u(rng), z = u(rng);
        pts.emplace_back(0.5 * x, 0.5 * y, 0.5 * z);
    }
    return pts;
}

}  // namespace

TEST_CASE("knn, radius and nearest match a linear scan") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 1000;
        const auto pts = (trial % 3 == 0) ? lattice_points(rng, n) : testing::random_points(rng, n);
        const NeighborIndex index(pts, 1 + rng() % 20);
        for (int q = 0; q < 20; ++q) {
            const Point3 query = (q % 4 == 0) ? pts[rng() % n] : testing::random_point(rng, 1.2);
            const auto all = brute_sorted(pts, query);
            const std::size_t k = 1 + rng() % 40;
            const auto got = index.knn(query, k);
            CHECK(got == std::vector<Neighbor>(all.begin(), all.begin() + std::min(k, n)));

            const double r = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
            std::vector<Neighbor> within;
            for (const auto& nb : all)
                if (nb.dist_sq <= r * r) within.push_back(nb);
            CHECK(index.radius(query, r) == within);
            CHECK(index.nearest(query) == all.front());
        }
    }
}

TEST_CASE("empty index") {
    const NeighborIndex index(std::vector<Point3>{});
    CHECK(index.knn({0, 0, 0}, 3).empty());
    CHECK(index.radius({0, 0, 0}, 1.0).empty());
    CHECK_THROWS_AS(index.nearest({0, 0, 0}), EmptyInput);
}

TEST_CASE("duplicate points tie to the smaller index") {
    const std::vector<Point3> pts{{1, 1, 1}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    const NeighborIndex index(pts, 1);
    CHECK(index.nearest({0, 0, 0}).index == 1);
    const auto two = index.knn({0, 0, 0}, 2);
    CHECK(two[0].index == 1);
    CHECK(two[1].index == 2);
}
