#pragma once

#include "gkmeans/core.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace gkmeans {

class NeighborTables;

/// k centroid vectors (row-major) plus the Euclidean movement of each center
/// in the latest update. Drift is diagnostic and never counted as a DC.
struct CentroidSet {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<double> centers; // k * dim
    std::vector<double> drift;   // k

    std::span<const double> center(std::size_t j) const {
        return {centers.data() + j * dim, dim};
    }
    std::span<double> center(std::size_t j) {
        return {centers.data() + j * dim, dim};
    }
};

/// Per-point cluster index and cached distance to the own centroid, plus
/// per-cluster member counts and componentwise sums. Counts are exact;
/// sums are maintained incrementally on reassignment and rebuilt (in
/// ascending point order) by update_centroids.
struct AssignState {
    std::vector<std::int32_t> assign;
    std::vector<double> own_dist;
    std::vector<std::int64_t> counts; // k
    std::vector<double> sums;         // k * dim
};

/// Solver telemetry, one row per iteration. pdc1/pdc2 are the "possible
/// distance computations" denominators for the savings percentages:
/// pdc1 = (m - le_count) * k, pdc2 = lhe_count * k.
struct IterationTelemetry {
    int iter = 0;
    std::uint64_t neighbor_pairs = 0;
    std::uint64_t le_count = 0;
    std::uint64_t lhe_count = 0;
    std::uint64_t he_count = 0;
    std::uint64_t dc_this_iter = 0;
    std::uint64_t pdc1 = 0;
    std::uint64_t pdc2 = 0;
    double sse_after_update = 0.0;
    std::uint64_t assign_hash = 0; // FNV-1a of the label vector, for cheap sequence comparison
};

/// Snapshot handed to SolverParams::inspect right after the neighbor tables
/// are built and the own distances / radii refreshed, before any filtering.
/// Only run_gkmeans fires it; tables is never null there.
struct IterationView {
    int iter;
    const DataMatrix& data;
    const CentroidSet& centroids;
    const AssignState& state;
    std::span<const double> radii;
    const NeighborTables* tables;
};

struct SolverParams {
    int max_iters = 500;
    double epsilon = 0.0;
    std::uint64_t seed = 0;

    /// Test hook: makes run_gkmeans prefer the new centroid on exact distance
    /// ties, deliberately breaking the shared keep-current rule. Lloyd and
    /// Hamerly ignore it, so symmetry checks can prove they detect mismatches.
    bool prefer_new_on_tie = false;

    /// Called at the end of every iteration with the current labels.
    std::function<void(int iter, std::span<const std::int32_t>)> on_assignments;

    /// See IterationView.
    std::function<void(const IterationView&)> inspect;
};

struct Solution {
    CentroidSet centroids;
    std::vector<std::int32_t> assign;
    int iterations = 0;
    double sse = 0.0;
    std::vector<IterationTelemetry> telemetry;
    OpCounters counters;
};

} // namespace gkmeans
