#pragma once

#include "vgreg/kernels.hpp"

namespace vgreg::kernels::detail {

void residuals_sq_scalar(const double* r, const double* t, const Correspondence* c,
                         std::size_t n, double* out);
void descriptor_dist_sq_scalar(const double* query, const double* blocked, std::size_t dim,
                               std::size_t num_blocks, double* out);

#if defined(VGREG_HAVE_AVX2)
void residuals_sq_avx2(const double* r, const double* t, const Correspondence* c,
                       std::size_t n, double* out);
void descriptor_dist_sq_avx2(const double* query, const double* blocked, std::size_t dim,
                             std::size_t num_blocks, double* out);
#endif

}  // namespace vgreg::kernels::detail
