#pragma once

#include "gkmeans/core.hpp"
#include "gkmeans/neighbors.hpp"
#include "gkmeans/solvers_types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gkmeans {

/// k distinct rows sampled without replacement, deterministic under seed.
/// Throws ConfigError unless 2 <= k <= m.
CentroidSet init_random(const DataMatrix& data, std::size_t k, std::uint64_t seed);

/// D^2 seeding: first center uniform over rows, each next row drawn with
/// probability proportional to its squared distance to the nearest chosen
/// center. Every per-row distance evaluation counts one DC. When all weights
/// collapse to zero (every row coincides with a chosen center) the draw falls
/// back to uniform sampling over the not-yet-chosen indices.
CentroidSet init_kmeanspp(const DataMatrix& data, std::size_t k, std::uint64_t seed,
                          OpCounters& counters);

/// Mean of each cluster, accumulated from scratch in ascending point-index
/// order so every solver produces bit-identical centers from the same
/// assignment. Empty clusters keep the previous center (drift 0). Rebuilds
/// state.sums/state.counts as a side effect; drift is not counted as a DC.
CentroidSet update_centroids(const DataMatrix& data, AssignState& state,
                             const CentroidSet& prev);

/// Decision trace for one point in the geometric filter: the LE shortcut,
/// and otherwise the per-neighbor LHE / HE / candidate-distance steps taken
/// in neighbor-list order with immediate reassignment semantics.
struct NeighborCheck {
    std::int32_t neighbor = -1;
    bool lhe = false;
    bool he = false;
    bool dist_computed = false;
    double candidate_dist = 0.0;
    bool took_over = false; // became the running best
};

struct PointClassification {
    bool le = false;
    std::int32_t final_assign = -1;
    double final_dist = 0.0;
    std::vector<NeighborCheck> checks;

    bool any_lhe() const;
    bool any_he() const;
};

/// Pure given its inputs; reproduces exactly the decisions run_gkmeans takes
/// for this point. state.own_dist[point_idx] must be current w.r.t. the
/// centroids the tables were built from (stale values are a contract
/// violation this function cannot detect). Candidate distances count DCs;
/// the LE check costs nothing.
void classify_point(std::size_t point_idx, const DataMatrix& data,
                    const NeighborTables& tables, const AssignState& state,
                    const CentroidSet& centroids, OpCounters& counters,
                    PointClassification& out, bool prefer_new_on_tie = false);

PointClassification classify_point(std::size_t point_idx, const DataMatrix& data,
                                   const NeighborTables& tables, const AssignState& state,
                                   const CentroidSet& centroids, OpCounters& counters,
                                   bool prefer_new_on_tie = false);

/// Lloyd's k-means: every iteration evaluates all m*k distances. The shared
/// tie-break rule: a point moves only for a strictly smaller distance; ties
/// with the current assignment keep it; ties among other centroids go to the
/// lowest index.
Solution run_lloyd(const DataMatrix& data, const CentroidSet& init, const SolverParams& params);

/// Geometric k-means: iteration 1 is a full Lloyd assignment; afterwards each
/// iteration updates centroids, tests convergence, refreshes every point's
/// own-centroid distance (one counted DC per point) to derive exact radii,
/// rebuilds the neighbor tables and only computes candidate distances for
/// points that pass the LE -> LHE -> HE filter chain. Produces the identical
/// assignment sequence as run_lloyd from the same init.
Solution run_gkmeans(const DataMatrix& data, const CentroidSet& init, const SolverParams& params);

/// Hamerly's bounded k-means: one upper bound (own centroid) and one lower
/// bound (second-closest) per point, inflated/deflated by centroid drift.
/// Exact: same assignment sequence as run_lloyd from the same init.
Solution run_hamerly(const DataMatrix& data, const CentroidSet& init, const SolverParams& params);

/// Shared diagnostic SSE: ascending-point-order accumulation, never touches
/// the DC counters.
double compute_sse(const DataMatrix& data, const CentroidSet& centroids,
                   std::span<const std::int32_t> assign);

/// FNV-1a over the label bytes; used to compare assignment sequences cheaply.
std::uint64_t hash_labels(std::span<const std::int32_t> assign);

} // namespace gkmeans
