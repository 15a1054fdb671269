#include "kernels_impl.hpp"

namespace vgreg::kernels::detail {

void residuals_sq_scalar(const double* r, const double* t, const Correspondence* c,
                         std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const Point3& p = c[i].source;
        const Point3& q = c[i].target;
        double x = r[0] * p.x();
        x = x + r[1] * p.y();
        x = x + r[2] * p.z();
        x = x + t[0];
        double y = r[3] * p.x();
        y = y + r[4] * p.y();
        y = y + r[5] * p.z();
        y = y + t[1];
        double z = r[6] * p.x();
        z = z + r[7] * p.y();
        z = z + r[8] * p.z();
        z = z + t[2];
        const double dx = x - q.x();
        const double dy = y - q.y();
        const double dz = z - q.z();
        double d2 = dx * dx;
        d2 = d2 + dy * dy;
        d2 = d2 + dz * dz;
        out[i] = d2;
    }
}

void descriptor_dist_sq_scalar(const double* query, const double* blocked, std::size_t dim,
                               std::size_t num_blocks, double* out) {
    for (std::size_t b = 0; b < num_blocks; ++b) {
        const double* block = blocked + b * dim * kBlockWidth;
        for (std::size_t lane = 0; lane < kBlockWidth; ++lane) {
            double acc = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = query[k] - block[k * kBlockWidth + lane];
                acc = acc + d * d;
            }
            out[b * kBlockWidth + lane] = acc;
        }
    }
}

}  // namespace vgreg::kernels::detail
