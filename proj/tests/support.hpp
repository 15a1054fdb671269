#pragma once

#include <cmath>
#include <random>

#include "vgreg/core.hpp"
#include "vgreg/random.hpp"

namespace testing {

// Geodesic angle between two rotations via atan2, accurate near zero where
// acos of the trace loses about eight digits.
inline double rotation_angle_between(const vgreg::RigidTransform& a, const vgreg::RigidTransform& b) {
    const vgreg::Matrix3 d = a.rotation().transpose() * b.rotation();
    const vgreg::Point3 v(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1));
    return std::atan2(0.5 * v.norm(), 0.5 * (d.trace() - 1.0));
}

inline vgreg::Point3 random_point(vgreg::Rng& rng, double extent = 1.0) {
    std::uniform_real_distribution<double> u(-extent, extent);
    const double x = u(rng), y = u(rng), z = u(rng);
    return {x, y, z};
}

inline vgreg::RigidTransform random_transform(vgreg::Rng& rng, double max_angle = 3.0, double max_t = 1.0) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> a(0.0, max_angle);
    const double ax = g(rng), ay = g(rng), az = g(rng);
    const double angle = a(rng);
    return vgreg::RigidTransform::from_axis_angle({ax, ay, az}, angle, random_point(rng, max_t));
}

inline std::vector<vgreg::Point3> random_points(vgreg::Rng& rng, std::size_t n, double extent = 1.0) {
    std::vector<vgreg::Point3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point(rng, extent));
    return pts;
}

// Pairs q = T(p) + gaussian noise; `outlier_fraction` of targets replaced by
// uniform points.
inline vgreg::CorrespondenceSet planted_pairs(vgreg::Rng& rng, const vgreg::RigidTransform& t, std::size_t n,
                                              double sigma = 0.0, double outlier_fraction = 0.0,
                                              vgreg::Provenance prov = vgreg::Provenance::Geometric) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    vgreg::CorrespondenceSet c;
    for (std::size_t i = 0; i < n; ++i) {
        vgreg::Correspondence x;
        x.source = random_point(rng);
        x.provenance = prov;
        if (u(rng) < outlier_fraction) {
            x.target = random_point(rng, 2.0);
        } else {
            x.target = t.apply(x.source);
            if (sigma > 0.0) {
                const double a = g(rng), b = g(rng), d = g(rng);
                x.target += vgreg::Point3(a, b, d) * sigma;
            }
        }
        c.push_back(x);
    }
    return c;
}

}  // namespace testing
