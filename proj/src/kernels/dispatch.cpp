#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace vgreg::kernels {

namespace {

const KernelTable kScalar{Isa::Scalar, &detail::residuals_sq_scalar,
                          &detail::descriptor_dist_sq_scalar};

#if defined(VGREG_HAVE_AVX2)
const KernelTable kAvx2{Isa::Avx2, &detail::residuals_sq_avx2, &detail::descriptor_dist_sq_avx2};

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}
#endif

const KernelTable* default_table() {
    if (const char* env = std::getenv("VGREG_SIMD")) {
        if (std::string(env) == "scalar") return &kScalar;
    }
    if (const KernelTable* t = avx2_table()) return t;
    return &kScalar;
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{default_table()};
    return slot;
}

}  // namespace

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(VGREG_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() { return *active_slot().load(std::memory_order_relaxed); }

void set_active(Isa isa) {
    const KernelTable* table = nullptr;
    switch (isa) {
        case Isa::Scalar: table = &kScalar; break;
        case Isa::Avx2: table = avx2_table(); break;
    }
    if (!table) throw InvalidArgument("kernel variant unavailable: " + std::string(to_string(isa)));
    active_slot().store(table, std::memory_order_relaxed);
}

std::vector<Isa> available() {
    std::vector<Isa> out{Isa::Scalar};
    if (avx2_table()) out.push_back(Isa::Avx2);
    return out;
}

BlockedDescriptors::BlockedDescriptors(std::span<const std::vector<double>> rows)
    : rows_(rows.size()), dim_(rows.empty() ? 0 : rows.front().size()) {
    data_.assign(blocks() * dim_ * kBlockWidth, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (rows[i].size() != dim_) throw InvalidArgument("descriptors have mixed dimensions");
        const std::size_t b = i / kBlockWidth;
        const std::size_t lane = i % kBlockWidth;
        for (std::size_t k = 0; k < dim_; ++k) {
            data_[(b * dim_ + k) * kBlockWidth + lane] = rows[i][k];
        }
    }
}

void BlockedDescriptors::distances_sq(std::span<const double> query, std::span<double> out,
                                      const KernelTable& table) const {
    if (query.size() != dim_) throw InvalidArgument("query descriptor dimension mismatch");
    if (out.size() < blocks() * kBlockWidth) throw InvalidArgument("output buffer too small");
    table.descriptor_dist_sq(query.data(), data_.data(), dim_, blocks(), out.data());
}

std::vector<double> residuals_sq(const RigidTransform& t, CorrespondenceView c,
                                 const KernelTable& table) {
    double r[9];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i * 3 + j] = t.rotation()(i, j);
    const double tr[3] = {t.translation().x(), t.translation().y(), t.translation().z()};
    std::vector<double> out(c.size());
    if (!c.empty()) table.residuals_sq(r, tr, c.data(), c.size(), out.data());
    return out;
}

}  // namespace vgreg::kernels
