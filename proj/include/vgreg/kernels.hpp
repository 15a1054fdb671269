#pragma once

// Data-parallel inner loops with a scalar reference implementation and SIMD
// variants chosen at runtime. Every variant performs the same IEEE operations
// in the same order (no FMA, per-lane accumulation), so results are
// bit-identical across variants and equivalence tests compare exactly.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "vgreg/core.hpp"

namespace vgreg::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Lane count of the blocked descriptor layout.
inline constexpr std::size_t kBlockWidth = 4;

struct KernelTable {
    Isa isa;

    /// out[i] = |R * c[i].source + t - c[i].target|^2 with R row-major.
    void (*residuals_sq)(const double* rotation, const double* translation,
                         const Correspondence* c, std::size_t n, double* out);

    /// Squared Euclidean distance from `query` (length dim) to every row of a
    /// blocked table: for block b, dimension k and lane l the value sits at
    /// blocked[(b * dim + k) * kBlockWidth + l]. Writes num_blocks * 4 values.
    void (*descriptor_dist_sq)(const double* query, const double* blocked, std::size_t dim,
                               std::size_t num_blocks, double* out);
};

const KernelTable& scalar_table();

/// Null when the binary lacks the variant or the CPU does not support it.
const KernelTable* avx2_table();

/// The table used by the library. Defaults to the widest supported variant;
/// the environment variable VGREG_SIMD=scalar forces the reference path.
const KernelTable& active();

/// Throws InvalidArgument if `isa` is unavailable on this machine.
void set_active(Isa isa);

std::vector<Isa> available();

/// Descriptor rows packed for descriptor_dist_sq. Padding lanes hold zeros;
/// their outputs must be ignored (index >= rows()).
class BlockedDescriptors {
public:
    BlockedDescriptors() = default;
    explicit BlockedDescriptors(std::span<const std::vector<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }
    std::size_t blocks() const { return (rows_ + kBlockWidth - 1) / kBlockWidth; }
    const double* data() const { return data_.data(); }

    /// Squared distances from `query` to every row, written to out[0..rows()).
    /// `out` must hold blocks() * kBlockWidth values.
    void distances_sq(std::span<const double> query, std::span<double> out,
                      const KernelTable& table = active()) const;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Convenience wrapper over active().residuals_sq.
std::vector<double> residuals_sq(const RigidTransform& t, CorrespondenceView c,
                                 const KernelTable& table = active());

}  // namespace vgreg::kernels
