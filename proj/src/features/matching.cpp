#include <cmath>
#include <limits>

#include "vgreg/features.hpp"
#include "vgreg/kernels.hpp"
#include "vgreg/parallel.hpp"

namespace vgreg {

namespace {

void check_descriptors(std::span<const Descriptor> d, const char* which) {
    if (d.empty()) return;
    const std::size_t dim = d.front().size();
    for (const auto& row : d) {
        if (row.size() != dim) {
            throw InvalidArgument(std::string(which) + " descriptors have mixed dimensions");
        }
    }
}

}  // namespace

CorrespondenceSet match_features(const PointCloud& source, const PointCloud& target,
                                 std::size_t threads) {
    if (source.descriptors.size() != source.size() || target.descriptors.size() != target.size()) {
        throw InvalidArgument("feature matching needs one descriptor per point in both clouds");
    }
    if (target.empty()) throw InvalidArgument("feature matching against an empty target");
    check_descriptors(source.descriptors, "source");
    check_descriptors(target.descriptors, "target");
    if (!source.empty() && source.descriptors.front().size() != target.descriptors.front().size()) {
        throw InvalidArgument("source and target descriptor dimensions differ");
    }

    const kernels::BlockedDescriptors table(target.descriptors);
    const kernels::KernelTable& k = kernels::active();
    CorrespondenceSet out(source.size());

    parallel_for(source.size(), threads, [&](std::size_t i) {
        thread_local std::vector<double> dist;
        dist.resize(table.blocks() * kernels::kBlockWidth);
        table.distances_sq(source.descriptors[i], dist, k);
        std::size_t best = 0;
        for (std::size_t j = 1; j < table.rows(); ++j) {
            if (dist[j] < dist[best]) best = j;
        }
        Correspondence& c = out[i];
        c.source = source.points[i];
        c.target = target.points[best];
        c.weight = descriptor_weight(std::sqrt(dist[best]));
        c.provenance = Provenance::Geometric;
        c.source_index = static_cast<std::int64_t>(i);
        c.target_index = static_cast<std::int64_t>(best);
    });
    return out;
}

CorrespondenceSet lowe_ratio_filter(CorrespondenceView matches,
                                    std::span<const Descriptor> source_descriptors,
                                    std::span<const Descriptor> target_descriptors,
                                    double ratio_threshold, std::size_t threads) {
    if (!(ratio_threshold > 0.0 && ratio_threshold <= 1.0)) {
        throw InvalidArgument("ratio threshold must lie in (0, 1]");
    }
    if (target_descriptors.size() < 2) {
        throw InvalidArgument("ratio test needs at least two target descriptors");
    }
    check_descriptors(source_descriptors, "source");
    check_descriptors(target_descriptors, "target");
    const std::size_t dim = target_descriptors.front().size();

    const kernels::BlockedDescriptors table(target_descriptors);
    const kernels::KernelTable& k = kernels::active();
    std::vector<std::uint8_t> keep(matches.size(), 0);

    parallel_for(matches.size(), threads, [&](std::size_t m) {
        const Correspondence& c = matches[m];
        if (c.source_index < 0 || static_cast<std::size_t>(c.source_index) >= source_descriptors.size() ||
            c.target_index < 0 || static_cast<std::size_t>(c.target_index) >= target_descriptors.size()) {
            throw InvalidArgument("ratio test needs valid source and target indices on every match");
        }
        const Descriptor& query = source_descriptors[static_cast<std::size_t>(c.source_index)];
        if (query.size() != dim) throw InvalidArgument("source and target descriptor dimensions differ");
        const std::size_t matched = static_cast<std::size_t>(c.target_index);

        thread_local std::vector<double> dist;
        dist.resize(table.blocks() * kernels::kBlockWidth);
        table.distances_sq(query, dist, k);
        double second = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < table.rows(); ++j) {
            if (j != matched && dist[j] < second) second = dist[j];
        }
        const double d1 = std::sqrt(dist[matched]);
        const double d2 = std::sqrt(second);
        double ratio;
        if (d2 == 0.0) {
            ratio = d1 == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        } else {
            ratio = d1 / d2;
        }
        keep[m] = ratio <= ratio_threshold ? 1 : 0;
    });

    CorrespondenceSet out;
    for (std::size_t m = 0; m < matches.size(); ++m) {
        if (keep[m]) out.push_back(matches[m]);
    }
    return out;
}

}  // namespace vgreg
