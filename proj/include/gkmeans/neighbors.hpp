#pragma once

#include "gkmeans/core.hpp"
#include "gkmeans/solvers_types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gkmeans {

/// One admitted neighbor of a centroid. The pair's midpoint and the affine
/// vector from that midpoint to the neighbor centroid live in the tables'
/// geometry arena at `geom`; use NeighborTables::link_mid / link_affine.
struct NeighborLink {
    std::int32_t index;
    std::size_t geom;
};

/// Per-iteration pruning tables: half inter-centroid distances M (M_ii is
/// +inf), nearest-other half distances s, the input radii, and the directed
/// neighbor lists. j is a neighbor of i exactly when M_ij <= r_i + s_i; the
/// boundary (==) admits, since over-inclusion is always safe. The relation is
/// directional: j in n(i) does not imply i in n(j). Midpoints/affines are
/// stored only for admitted pairs, keeping memory at O(sum |n(i)| * d)
/// instead of a dense k*k*d grid.
class NeighborTables {
public:
    std::size_t k() const { return k_; }

    double half_dist(std::size_t i, std::size_t j) const { return m_half_[i * k_ + j]; }
    double nearest_half_dist(std::size_t i) const { return s_[i]; }
    double radius(std::size_t i) const { return radii_[i]; }

    const std::vector<NeighborLink>& neighbors(std::size_t i) const { return neighbors_[i]; }
    bool is_neighbor(std::size_t i, std::size_t j) const;

    std::span<const double> link_mid(const NeighborLink& link) const {
        return {geometry_.data() + link.geom, dim_};
    }
    std::span<const double> link_affine(const NeighborLink& link) const {
        return {geometry_.data() + link.geom + dim_, dim_};
    }

    /// Midpoint of an admitted pair, looked up in either orientation; empty
    /// when neither direction was admitted.
    std::optional<std::span<const double>> midpoint_of(std::size_t i, std::size_t j) const;

    std::uint64_t total_neighbor_pairs() const;

private:
    friend NeighborTables compute_neighbor_tables(const CentroidSet&,
                                                  std::span<const double>, OpCounters&);
    std::size_t k_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> m_half_;
    std::vector<double> s_;
    std::vector<double> radii_;
    std::vector<std::vector<NeighborLink>> neighbors_;
    std::vector<double> geometry_; // [mid | affine] per admitted link
};

/// Builds the tables from the current centroids and exact cluster radii.
/// Performs exactly k(k-1)/2 centroid-pair distance evaluations, each counted
/// in dc_full and dc_neighbor. No sorting anywhere.
/// Throws ConfigError for k < 2 and ParseError for non-finite centroids.
NeighborTables compute_neighbor_tables(const CentroidSet& centroids,
                                       std::span<const double> radii,
                                       OpCounters& counters);

} // namespace gkmeans
