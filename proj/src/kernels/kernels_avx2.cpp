// Built with -mavx2 only (no -mfma); entered solely after a runtime CPU check.
#include <immintrin.h>

#include "kernels_impl.hpp"

namespace vgreg::kernels::detail {

namespace {

inline __m256d gather4(const Correspondence* c, std::size_t i, int which, int axis) {
    auto at = [&](std::size_t k) {
        const Point3& v = which == 0 ? c[i + k].source : c[i + k].target;
        return v[axis];
    };
    return _mm256_set_pd(at(3), at(2), at(1), at(0));
}

}  // namespace

void residuals_sq_avx2(const double* r, const double* t, const Correspondence* c,
                       std::size_t n, double* out) {
    const __m256d r00 = _mm256_set1_pd(r[0]), r01 = _mm256_set1_pd(r[1]), r02 = _mm256_set1_pd(r[2]);
    const __m256d r10 = _mm256_set1_pd(r[3]), r11 = _mm256_set1_pd(r[4]), r12 = _mm256_set1_pd(r[5]);
    const __m256d r20 = _mm256_set1_pd(r[6]), r21 = _mm256_set1_pd(r[7]), r22 = _mm256_set1_pd(r[8]);
    const __m256d tx = _mm256_set1_pd(t[0]), ty = _mm256_set1_pd(t[1]), tz = _mm256_set1_pd(t[2]);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d px = gather4(c, i, 0, 0), py = gather4(c, i, 0, 1), pz = gather4(c, i, 0, 2);
        const __m256d qx = gather4(c, i, 1, 0), qy = gather4(c, i, 1, 1), qz = gather4(c, i, 1, 2);

        __m256d x = _mm256_mul_pd(r00, px);
        x = _mm256_add_pd(x, _mm256_mul_pd(r01, py));
        x = _mm256_add_pd(x, _mm256_mul_pd(r02, pz));
        x = _mm256_add_pd(x, tx);
        __m256d y = _mm256_mul_pd(r10, px);
        y = _mm256_add_pd(y, _mm256_mul_pd(r11, py));
        y = _mm256_add_pd(y, _mm256_mul_pd(r12, pz));
        y = _mm256_add_pd(y, ty);
        __m256d z = _mm256_mul_pd(r20, px);
        z = _mm256_add_pd(z, _mm256_mul_pd(r21, py));
        z = _mm256_add_pd(z, _mm256_mul_pd(r22, pz));
        z = _mm256_add_pd(z, tz);

        const __m256d dx = _mm256_sub_pd(x, qx);
        const __m256d dy = _mm256_sub_pd(y, qy);
        const __m256d dz = _mm256_sub_pd(z, qz);
        __m256d d2 = _mm256_mul_pd(dx, dx);
        d2 = _mm256_add_pd(d2, _mm256_mul_pd(dy, dy));
        d2 = _mm256_add_pd(d2, _mm256_mul_pd(dz, dz));
        _mm256_storeu_pd(out + i, d2);
    }
    if (i < n) residuals_sq_scalar(r, t, c + i, n - i, out + i);
}

void descriptor_dist_sq_avx2(const double* query, const double* blocked, std::size_t dim,
                             std::size_t num_blocks, double* out) {
    static_assert(kBlockWidth == 4, "AVX2 kernel assumes four double lanes");
    for (std::size_t b = 0; b < num_blocks; ++b) {
        const double* block = blocked + b * dim * kBlockWidth;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t k = 0; k < dim; ++k) {
            const __m256d d = _mm256_sub_pd(_mm256_set1_pd(query[k]),
                                            _mm256_loadu_pd(block + k * kBlockWidth));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
        }
        _mm256_storeu_pd(out + b * kBlockWidth, acc);
    }
}

}  // namespace vgreg::kernels::detail
