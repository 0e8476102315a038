#include "gkmeans/neighbors.hpp"
#include "gkmeans/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gkmeans {

bool NeighborTables::is_neighbor(std::size_t i, std::size_t j) const {
    for (const NeighborLink& link : neighbors_[i]) {
        if (static_cast<std::size_t>(link.index) == j) return true;
    }
    return false;
}

std::optional<std::span<const double>> NeighborTables::midpoint_of(std::size_t i,
                                                                   std::size_t j) const {
    for (const NeighborLink& link : neighbors_[i]) {
        if (static_cast<std::size_t>(link.index) == j) return link_mid(link);
    }
    for (const NeighborLink& link : neighbors_[j]) {
        if (static_cast<std::size_t>(link.index) == i) return link_mid(link);
    }
    return std::nullopt;
}

std::uint64_t NeighborTables::total_neighbor_pairs() const {
    std::uint64_t total = 0;
    for (const auto& list : neighbors_) total += list.size();
    return total;
}

NeighborTables compute_neighbor_tables(const CentroidSet& centroids,
                                       std::span<const double> radii,
                                       OpCounters& counters) {
    const std::size_t k = centroids.k;
    const std::size_t dim = centroids.dim;
    if (k < 2) {
        throw ConfigError("neighbor tables need k >= 2, got k = " + std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) {
        for (double v : centroids.center(j)) {
            if (!std::isfinite(v)) {
                throw ParseError("non-finite centroid " + std::to_string(j));
            }
        }
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    NeighborTables t;
    t.k_ = k;
    t.dim_ = dim;
    t.m_half_.assign(k * k, inf);
    t.s_.assign(k, inf);
    t.radii_.assign(radii.begin(), radii.end());
    t.neighbors_.assign(k, {});

    // Half inter-centroid distances over the lower triangle: k(k-1)/2
    // evaluations, each counted as a DC in the neighbor bucket.
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double half = 0.5 * dist(centroids.center(i), centroids.center(j), counters);
            counters.dc_neighbor += 1;
            t.m_half_[i * k + j] = half;
            t.m_half_[j * k + i] = half;
            if (half < t.s_[i]) t.s_[i] = half;
            if (half < t.s_[j]) t.s_[j] = half;
        }
    }

    const auto admitted = [&t, k](std::size_t i, std::size_t j) {
        return i != j && t.m_half_[i * k + j] <= t.radii_[i] + t.s_[i];
    };

    // size the geometry arena first so link spans stay stable while filling
    std::size_t links = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (admitted(i, j)) ++links;
        }
    }
    t.geometry_.resize(links * 2 * dim);

    std::size_t offset = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (!admitted(i, j)) continue;
            const auto ci = centroids.center(i);
            const auto cj = centroids.center(j);
            double* mid = t.geometry_.data() + offset;
            double* affine = mid + dim;
            for (std::size_t dd = 0; dd < dim; ++dd) {
                mid[dd] = 0.5 * (ci[dd] + cj[dd]);
                affine[dd] = cj[dd] - mid[dd];
            }
            t.neighbors_[i].push_back(
                NeighborLink{static_cast<std::int32_t>(j), offset});
            offset += 2 * dim;
        }
    }

    return t;
}

} // namespace gkmeans
