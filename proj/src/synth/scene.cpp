#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vgreg/synth.hpp"

namespace vgreg {

namespace {

constexpr double kHitEpsilon = 1e-9;

Point3 random_unit(Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        const Point3 v(g(rng), g(rng), g(rng));
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

std::optional<double> box_hit(const Point3& o, const Point3& d, const Point3& h) {
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (std::abs(d[a]) < 1e-15) {
            if (std::abs(o[a]) > h[a]) return std::nullopt;
            continue;
        }
        double ta = (-h[a] - o[a]) / d[a];
        double tb = (h[a] - o[a]) / d[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
    }
    if (t0 > kHitEpsilon) return t0;
    if (t1 > kHitEpsilon) return t1;
    return std::nullopt;
}

}  // namespace

double Primitive::area() const {
    const Point3& h = half_extent;
    switch (kind) {
        case Kind::Rectangle: return 4.0 * h.x() * h.y();
        case Kind::Box: return 8.0 * (h.x() * h.y() + h.y() * h.z() + h.x() * h.z());
        case Kind::Sphere: return 4.0 * std::numbers::pi * h.x() * h.x();
    }
    return 0.0;
}

Point3 Primitive::sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Point3& h = half_extent;
    switch (kind) {
        case Kind::Rectangle:
            return center + axes.col(0) * (h.x() * u(rng)) + axes.col(1) * (h.y() * u(rng));
        case Kind::Box: {
            const double faces[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
            std::discrete_distribution<int> pick({faces[0], faces[0], faces[1], faces[1], faces[2], faces[2]});
            const int f = pick(rng);
            const int axis = f / 2;
            Point3 local(h.x() * u(rng), h.y() * u(rng), h.z() * u(rng));
            local[axis] = (f % 2 == 0 ? -1.0 : 1.0) * h[axis];
            return center + axes * local;
        }
        case Kind::Sphere:
            return center + random_unit(rng) * h.x();
    }
    return center;
}

std::optional<double> Primitive::intersect(const Point3& origin, const Point3& dir) const {
    switch (kind) {
        case Kind::Rectangle: {
            const Point3 n = axes.col(2);
            const double denom = n.dot(dir);
            if (std::abs(denom) < 1e-12) return std::nullopt;
            const double s = n.dot(center - origin) / denom;
            if (s <= kHitEpsilon) return std::nullopt;
            const Point3 local = origin + s * dir - center;
            if (std::abs(local.dot(axes.col(0))) > half_extent.x() ||
                std::abs(local.dot(axes.col(1))) > half_extent.y()) {
                return std::nullopt;
            }
            return s;
        }
        case Kind::Box:
            return box_hit(axes.transpose() * (origin - center), axes.transpose() * dir, half_extent);
        case Kind::Sphere: {
            const Point3 oc = origin - center;
            const double a = dir.squaredNorm();
            const double b = oc.dot(dir);
            const double c = oc.squaredNorm() - half_extent.x() * half_extent.x();
            const double disc = b * b - a * c;
            if (disc < 0.0) return std::nullopt;
            const double root = std::sqrt(disc);
            const double s0 = (-b - root) / a;
            if (s0 > kHitEpsilon) return s0;
            const double s1 = (-b + root) / a;
            if (s1 > kHitEpsilon) return s1;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<double> Scene::intersect(const Point3& origin, const Point3& dir) const {
    std::optional<double> best;
    for (const auto& p : primitives) {
        const auto s = p.intersect(origin, dir);
        if (s && (!best || *s < *best)) best = s;
    }
    return best;
}

Scene make_scene(double extent, Rng& rng) {
    const double e = extent;
    const double floor_y = 0.25 * e;
    const double zc = 1.0 + 0.5 * e;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    Scene scene;
    scene.center = Point3(0.0, floor_y - 0.125 * e, zc);

    Primitive floor;
    floor.center = Point3(0.0, floor_y, zc);
    floor.axes.col(0) = Point3::UnitX();
    floor.axes.col(1) = Point3::UnitZ();
    floor.axes.col(2) = Point3::UnitX().cross(Point3::UnitZ());
    floor.half_extent = Point3(0.5 * e, 0.5 * e, 0.0);
    scene.primitives.push_back(floor);

    Primitive back;
    back.center = Point3(0.0, floor_y - 0.25 * e, 1.0 + e);
    back.half_extent = Point3(0.5 * e, 0.25 * e, 0.0);
    scene.primitives.push_back(back);

    Primitive side;
    side.center = Point3(-0.5 * e, floor_y - 0.25 * e, zc);
    side.axes.col(0) = Point3::UnitZ();
    side.axes.col(1) = Point3::UnitY();
    side.axes.col(2) = Point3::UnitZ().cross(Point3::UnitY());
    side.half_extent = Point3(0.5 * e, 0.25 * e, 0.0);
    scene.primitives.push_back(side);

    const double unit_size = 0.25 * e;
    const int boxes = 2 + static_cast<int>(unit(rng) * 3.0);
    for (int i = 0; i < boxes; ++i) {
        Primitive box;
        box.kind = Primitive::Kind::Box;
        box.half_extent = Point3(uniform(0.1, 0.4), uniform(0.1, 0.4), uniform(0.1, 0.4)) * unit_size;
        const double yaw = uniform(0.0, std::numbers::pi);
        box.axes = Eigen::AngleAxisd(yaw, Point3::UnitY()).toRotationMatrix();
        box.center = Point3(uniform(-e / 3.0, e / 3.0), floor_y - box.half_extent.y(),
                            uniform(zc - e / 3.0, zc + e / 3.0));
        scene.primitives.push_back(box);
    }
    const int spheres = 1 + static_cast<int>(unit(rng) * 3.0);
    for (int i = 0; i < spheres; ++i) {
        Primitive s;
        s.kind = Primitive::Kind::Sphere;
        const double r = uniform(0.1, 0.35) * unit_size;
        s.half_extent = Point3(r, r, r);
        s.center = Point3(uniform(-e / 3.0, e / 3.0), floor_y - r - uniform(0.0, 0.3) * unit_size,
                          uniform(zc - e / 3.0, zc + e / 3.0));
        scene.primitives.push_back(s);
    }
    return scene;
}

}  // namespace vgreg
