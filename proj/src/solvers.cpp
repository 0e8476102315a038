#include "gkmeans/solvers.hpp"
#include "gkmeans/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace gkmeans {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_k_le_m(std::size_t k, std::size_t m) {
    if (k > m) {
        throw ConfigError("k = " + std::to_string(k) + " exceeds point count m = " +
                          std::to_string(m));
    }
}

void require_params(const SolverParams& params) {
    if (params.max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (params.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
}

double max_drift(const CentroidSet& c) {
    double d = 0.0;
    for (double v : c.drift) d = std::max(d, v);
    return d;
}

void move_point(AssignState& state, const DataMatrix& data, std::size_t i,
                std::int32_t to, double new_dist) {
    const std::int32_t from = state.assign[i];
    const auto x = data.row(i);
    const std::size_t dim = data.dim();
    state.counts[from] -= 1;
    state.counts[to] += 1;
    double* sf = state.sums.data() + static_cast<std::size_t>(from) * dim;
    double* st = state.sums.data() + static_cast<std::size_t>(to) * dim;
    for (std::size_t t = 0; t < dim; ++t) {
        sf[t] -= x[t];
        st[t] += x[t];
    }
    state.assign[i] = to;
    state.own_dist[i] = new_dist;
}

/// Full assignment pass with no prior labels: scan all centroids in ascending
/// index order, strictly-smaller wins, so ties land on the lowest index.
/// Exactly m*k counted distances. Optionally records each point's
/// second-closest distance (for Hamerly's lower bound).
void initial_assign(const DataMatrix& data, const CentroidSet& centroids,
                    OpCounters& counters, bool prefer_new_on_tie, AssignState& state,
                    std::vector<double>* second_best) {
    const std::size_t m = data.rows();
    const std::size_t k = centroids.k;
    const std::size_t dim = data.dim();
    state.assign.assign(m, 0);
    state.own_dist.assign(m, 0.0);
    state.counts.assign(k, 0);
    state.sums.assign(k * dim, 0.0);
    if (second_best) second_best->assign(m, kInf);

    for (std::size_t i = 0; i < m; ++i) {
        const auto x = data.row(i);
        double best = kInf;
        double second = kInf;
        std::int32_t best_j = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d = dist(x, centroids.center(j), counters);
            const bool better = prefer_new_on_tie ? (d <= best) : (d < best);
            if (better) {
                second = best;
                best = d;
                best_j = static_cast<std::int32_t>(j);
            } else if (d < second) {
                second = d;
            }
        }
        state.assign[i] = best_j;
        state.own_dist[i] = best;
        state.counts[best_j] += 1;
        double* s = state.sums.data() + static_cast<std::size_t>(best_j) * dim;
        for (std::size_t t = 0; t < dim; ++t) s[t] += x[t];
        if (second_best) (*second_best)[i] = second;
    }
}

/// Lloyd reassignment: seeded with the current assignment so that an exact
/// tie with it keeps the point; other ties resolve to the lowest index.
/// Exactly k counted distances per point.
void lloyd_reassign(const DataMatrix& data, const CentroidSet& centroids,
                    OpCounters& counters, AssignState& state) {
    const std::size_t m = data.rows();
    const std::size_t k = centroids.k;
    for (std::size_t i = 0; i < m; ++i) {
        const auto x = data.row(i);
        const std::int32_t cur = state.assign[i];
        double best = dist(x, centroids.center(cur), counters);
        std::int32_t best_j = cur;
        for (std::size_t j = 0; j < k; ++j) {
            if (static_cast<std::int32_t>(j) == cur) continue;
            const double d = dist(x, centroids.center(j), counters);
            if (d < best) {
                best = d;
                best_j = static_cast<std::int32_t>(j);
            }
        }
        if (best_j != cur) {
            move_point(state, data, i, best_j, best);
        } else {
            state.own_dist[i] = best;
        }
    }
}

IterationTelemetry make_row(int iter, std::uint64_t dc, std::size_t m, std::size_t k,
                            double sse, std::uint64_t hash) {
    IterationTelemetry row;
    row.iter = iter;
    row.dc_this_iter = dc;
    row.pdc1 = static_cast<std::uint64_t>(m) * k;
    row.pdc2 = 0;
    row.sse_after_update = sse;
    row.assign_hash = hash;
    return row;
}

#ifndef NDEBUG
void validate_bookkeeping(const DataMatrix& data, const AssignState& state, std::size_t k) {
    const std::size_t dim = data.dim();
    std::vector<std::int64_t> counts(k, 0);
    std::vector<double> sums(k * dim, 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const std::int32_t j = state.assign[i];
        counts[j] += 1;
        const auto x = data.row(i);
        for (std::size_t t = 0; t < dim; ++t) sums[static_cast<std::size_t>(j) * dim + t] += x[t];
    }
    for (std::size_t j = 0; j < k; ++j) {
        assert(counts[j] == state.counts[j]);
        for (std::size_t t = 0; t < dim; ++t) {
            const double a = sums[j * dim + t];
            const double b = state.sums[j * dim + t];
            assert(std::abs(a - b) <= 1e-6 * (1.0 + std::abs(a)));
        }
    }
}
#endif

} // namespace

bool PointClassification::any_lhe() const {
    for (const NeighborCheck& c : checks)
        if (c.lhe) return true;
    return false;
}

bool PointClassification::any_he() const {
    for (const NeighborCheck& c : checks)
        if (c.he) return true;
    return false;
}

namespace {

/// One body for the LE -> LHE -> HE filter chain; the trace policy decides
/// whether per-neighbor steps are recorded (public classify_point) or just
/// tallied (the solver hot loop). Keeping a single body is what guarantees
/// the recorded trace reproduces the solver's decisions exactly.
struct TallyTrace {
    bool any_lhe = false;
    bool any_he = false;
    void on_check(std::int32_t, bool lhe, bool he, bool, double, bool) {
        any_lhe |= lhe;
        any_he |= he;
    }
};

struct RecordTrace {
    std::vector<NeighborCheck>& checks;
    void on_check(std::int32_t neighbor, bool lhe, bool he, bool computed, double cand,
                  bool took_over) {
        checks.push_back(NeighborCheck{neighbor, lhe, he, computed, cand, took_over});
    }
};

struct FilterOutcome {
    bool le = false;
    std::int32_t final_assign = -1;
    double final_dist = 0.0;
};

template <class Trace>
FilterOutcome filter_point(std::size_t point_idx, const DataMatrix& data,
                           const NeighborTables& tables, const AssignState& state,
                           const CentroidSet& centroids, OpCounters& counters,
                           bool prefer_new_on_tie, Trace& trace) {
    FilterOutcome out;
    const std::int32_t own = state.assign[point_idx];
    const double own_d = state.own_dist[point_idx];

    if (own_d <= tables.nearest_half_dist(own)) {
        out.le = true;
        out.final_assign = own;
        out.final_dist = own_d;
        return out;
    }

    const auto x = data.row(point_idx);
    double best = own_d;
    std::int32_t best_j = own;
    for (const NeighborLink& link : tables.neighbors(own)) {
        // LHE and HE are always judged against the original centroid; only
        // the final comparison races against the running best.
        const bool lhe = own_d > tables.half_dist(own, link.index);
        bool he = false;
        bool computed = false;
        double cand = 0.0;
        bool took_over = false;
        if (lhe) {
            he = he_test(tables.link_mid(link), tables.link_affine(link), x, counters);
            if (he) {
                cand = dist(x, centroids.center(link.index), counters);
                computed = true;
                const bool better = prefer_new_on_tie ? (cand <= best) : (cand < best);
                if (better) {
                    best = cand;
                    best_j = link.index;
                    took_over = true;
                }
            }
        }
        trace.on_check(link.index, lhe, he, computed, cand, took_over);
    }
    out.final_assign = best_j;
    out.final_dist = best;
    return out;
}

} // namespace

CentroidSet init_random(const DataMatrix& data, std::size_t k, std::uint64_t seed) {
    const std::size_t m = data.rows();
    if (k < 2) throw ConfigError("init needs k >= 2");
    require_k_le_m(k, m);

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t t = 0; t < k; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, m - 1);
        std::swap(idx[t], idx[pick(rng)]);
    }

    CentroidSet c;
    c.k = k;
    c.dim = data.dim();
    c.centers.resize(k * c.dim);
    c.drift.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const auto row = data.row(idx[j]);
        std::copy(row.begin(), row.end(), c.centers.begin() + j * c.dim);
    }
    return c;
}

CentroidSet init_kmeanspp(const DataMatrix& data, std::size_t k, std::uint64_t seed,
                          OpCounters& counters) {
    const std::size_t m = data.rows();
    if (k < 2) throw ConfigError("init needs k >= 2");
    require_k_le_m(k, m);

    std::mt19937_64 rng(seed);
    CentroidSet c;
    c.k = k;
    c.dim = data.dim();
    c.centers.resize(k * c.dim);
    c.drift.assign(k, 0.0);

    std::vector<bool> chosen(m, false);
    std::vector<double> best_d2(m, kInf);

    std::uniform_int_distribution<std::size_t> uniform_row(0, m - 1);
    std::size_t first = uniform_row(rng);
    chosen[first] = true;
    {
        const auto row = data.row(first);
        std::copy(row.begin(), row.end(), c.centers.begin());
    }

    for (std::size_t next = 1; next < k; ++next) {
        // refresh weights against the center just added
        const auto added = c.center(next - 1);
        for (std::size_t i = 0; i < m; ++i) {
            const double d2 = sq_dist(data.row(i), added);
            counters.dc_full += 1;
            if (d2 < best_d2[i]) best_d2[i] = d2;
        }

        double sum = 0.0;
        for (double w : best_d2) sum += w;

        std::size_t pick = m; // sentinel
        if (sum > 0.0 && std::isfinite(sum)) {
            std::uniform_real_distribution<double> unif(0.0, sum);
            const double target = unif(rng);
            double cum = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                cum += best_d2[i];
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
        }
        if (pick == m) {
            // all remaining weights are zero: uniform over unchosen indices
            std::vector<std::size_t> open;
            for (std::size_t i = 0; i < m; ++i)
                if (!chosen[i]) open.push_back(i);
            std::uniform_int_distribution<std::size_t> fallback(0, open.size() - 1);
            pick = open[fallback(rng)];
        }
        chosen[pick] = true;
        const auto row = data.row(pick);
        std::copy(row.begin(), row.end(), c.centers.begin() + next * c.dim);
    }
    return c;
}

CentroidSet update_centroids(const DataMatrix& data, AssignState& state,
                             const CentroidSet& prev) {
    const std::size_t k = prev.k;
    const std::size_t dim = prev.dim;

#ifndef NDEBUG
    validate_bookkeeping(data, state, k);
#endif

    // rebuild from scratch in ascending point order: fixed summation order
    // makes centers bit-identical across solvers for the same assignment
    std::fill(state.sums.begin(), state.sums.end(), 0.0);
    std::fill(state.counts.begin(), state.counts.end(), 0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const std::int32_t j = state.assign[i];
        state.counts[j] += 1;
        const auto x = data.row(i);
        double* s = state.sums.data() + static_cast<std::size_t>(j) * dim;
        for (std::size_t t = 0; t < dim; ++t) s[t] += x[t];
    }

    CentroidSet next;
    next.k = k;
    next.dim = dim;
    next.centers.resize(k * dim);
    next.drift.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        const auto old_center = prev.center(j);
        auto new_center = next.center(j);
        if (state.counts[j] > 0) {
            const double inv = 1.0 / static_cast<double>(state.counts[j]);
            const double* s = state.sums.data() + j * dim;
            for (std::size_t t = 0; t < dim; ++t) new_center[t] = s[t] * inv;
            next.drift[j] = std::sqrt(sq_dist(old_center, new_center));
        } else {
            std::copy(old_center.begin(), old_center.end(), new_center.begin());
            next.drift[j] = 0.0;
        }
    }
    return next;
}

void classify_point(std::size_t point_idx, const DataMatrix& data,
                    const NeighborTables& tables, const AssignState& state,
                    const CentroidSet& centroids, OpCounters& counters,
                    PointClassification& out, bool prefer_new_on_tie) {
    out.checks.clear();
    RecordTrace trace{out.checks};
    const FilterOutcome fo = filter_point(point_idx, data, tables, state, centroids,
                                          counters, prefer_new_on_tie, trace);
    out.le = fo.le;
    out.final_assign = fo.final_assign;
    out.final_dist = fo.final_dist;
}

PointClassification classify_point(std::size_t point_idx, const DataMatrix& data,
                                   const NeighborTables& tables, const AssignState& state,
                                   const CentroidSet& centroids, OpCounters& counters,
                                   bool prefer_new_on_tie) {
    PointClassification out;
    classify_point(point_idx, data, tables, state, centroids, counters, out,
                   prefer_new_on_tie);
    return out;
}

double compute_sse(const DataMatrix& data, const CentroidSet& centroids,
                   std::span<const std::int32_t> assign) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        total += sq_dist(data.row(i), centroids.center(assign[i]));
    }
    return total;
}

std::uint64_t hash_labels(std::span<const std::int32_t> assign) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t v : assign) {
        for (int b = 0; b < 4; ++b) {
            h ^= static_cast<std::uint64_t>((static_cast<std::uint32_t>(v) >> (8 * b)) & 0xff);
            h *= 1099511628211ull;
        }
    }
    return h;
}

Solution run_lloyd(const DataMatrix& data, const CentroidSet& init, const SolverParams& params) {
    require_params(params);
    require_k_le_m(init.k, data.rows());
    const std::size_t m = data.rows();
    const std::size_t k = init.k;

    Solution sol;
    OpCounters& ctr = sol.counters;
    CentroidSet centroids = init;
    centroids.drift.assign(k, 0.0);

    AssignState state;
    initial_assign(data, centroids, ctr, false, state, nullptr);
    int iterations = 1;
    sol.telemetry.push_back(make_row(1, ctr.dc_full, m, k,
                                     compute_sse(data, centroids, state.assign),
                                     hash_labels(state.assign)));
    if (params.on_assignments) params.on_assignments(1, state.assign);

    while (iterations < params.max_iters) {
        const std::uint64_t dc_start = ctr.dc_full;
        centroids = update_centroids(data, state, centroids);
        if (max_drift(centroids) <= params.epsilon) break;
        lloyd_reassign(data, centroids, ctr, state);
        ++iterations;
        sol.telemetry.push_back(make_row(iterations, ctr.dc_full - dc_start, m, k,
                                         compute_sse(data, centroids, state.assign),
                                         hash_labels(state.assign)));
        if (params.on_assignments) params.on_assignments(iterations, state.assign);
    }

    sol.centroids = std::move(centroids);
    sol.assign = std::move(state.assign);
    sol.iterations = iterations;
    sol.sse = compute_sse(data, sol.centroids, sol.assign);
    return sol;
}

Solution run_gkmeans(const DataMatrix& data, const CentroidSet& init, const SolverParams& params) {
    require_params(params);
    if (init.k < 2) throw ConfigError("gkmeans needs k >= 2");
    require_k_le_m(init.k, data.rows());
    const std::size_t m = data.rows();
    const std::size_t k = init.k;

    Solution sol;
    OpCounters& ctr = sol.counters;
    CentroidSet centroids = init;
    centroids.drift.assign(k, 0.0);

    AssignState state;
    initial_assign(data, centroids, ctr, params.prefer_new_on_tie, state, nullptr);
    int iterations = 1;
    sol.telemetry.push_back(make_row(1, ctr.dc_full, m, k,
                                     compute_sse(data, centroids, state.assign),
                                     hash_labels(state.assign)));
    if (params.on_assignments) params.on_assignments(1, state.assign);

    std::vector<double> radii(k, 0.0);

    while (iterations < params.max_iters) {
        const std::uint64_t dc_start = ctr.dc_full;
        centroids = update_centroids(data, state, centroids);
        if (max_drift(centroids) <= params.epsilon) break;

        // refresh every point's own distance (one counted DC each) so radii
        // are the exact per-cluster maxima neighbor pruning relies on
        std::fill(radii.begin(), radii.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const std::int32_t own = state.assign[i];
            const double d = dist(data.row(i), centroids.center(own), ctr);
            ctr.dc_le += 1;
            state.own_dist[i] = d;
            if (d > radii[own]) radii[own] = d;
        }

        const NeighborTables tables = compute_neighbor_tables(centroids, radii, ctr);
        if (params.inspect) {
            params.inspect(IterationView{iterations + 1, data, centroids, state, radii, &tables});
        }

        std::uint64_t le = 0, lhe = 0, he = 0;
        for (std::size_t i = 0; i < m; ++i) {
            TallyTrace tally;
            const FilterOutcome fo = filter_point(i, data, tables, state, centroids, ctr,
                                                  params.prefer_new_on_tie, tally);
            if (fo.le) {
                ++le;
                continue;
            }
            if (tally.any_lhe) ++lhe;
            if (tally.any_he) ++he;
            if (fo.final_assign != state.assign[i]) {
                move_point(state, data, i, fo.final_assign, fo.final_dist);
            }
        }

        ++iterations;
        IterationTelemetry row;
        row.iter = iterations;
        row.neighbor_pairs = tables.total_neighbor_pairs();
        row.le_count = le;
        row.lhe_count = lhe;
        row.he_count = he;
        row.dc_this_iter = ctr.dc_full - dc_start;
        row.pdc1 = (static_cast<std::uint64_t>(m) - le) * k;
        row.pdc2 = lhe * k;
        row.sse_after_update = compute_sse(data, centroids, state.assign);
        row.assign_hash = hash_labels(state.assign);
        sol.telemetry.push_back(row);
        if (params.on_assignments) params.on_assignments(iterations, state.assign);
    }

    sol.centroids = std::move(centroids);
    sol.assign = std::move(state.assign);
    sol.iterations = iterations;
    sol.sse = compute_sse(data, sol.centroids, sol.assign);
    return sol;
}

Solution run_hamerly(const DataMatrix& data, const CentroidSet& init, const SolverParams& params) {
    require_params(params);
    require_k_le_m(init.k, data.rows());
    const std::size_t m = data.rows();
    const std::size_t k = init.k;

    Solution sol;
    OpCounters& ctr = sol.counters;
    CentroidSet centroids = init;
    centroids.drift.assign(k, 0.0);

    AssignState state;
    std::vector<double> lower;
    initial_assign(data, centroids, ctr, false, state, &lower);
    std::vector<double> upper = state.own_dist;

    int iterations = 1;
    sol.telemetry.push_back(make_row(1, ctr.dc_full, m, k,
                                     compute_sse(data, centroids, state.assign),
                                     hash_labels(state.assign)));
    if (params.on_assignments) params.on_assignments(1, state.assign);

    std::vector<double> s(k, kInf);

    while (iterations < params.max_iters) {
        const std::uint64_t dc_start = ctr.dc_full;
        centroids = update_centroids(data, state, centroids);
        if (max_drift(centroids) <= params.epsilon) break;

        // drift of the two furthest-moving centers drives the bound updates
        double longest = 0.0, second_longest = 0.0;
        std::size_t furthest = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double dj = centroids.drift[j];
            if (dj > longest) {
                second_longest = longest;
                longest = dj;
                furthest = j;
            } else if (dj > second_longest) {
                second_longest = dj;
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            const std::int32_t own = state.assign[i];
            upper[i] += centroids.drift[own];
            lower[i] -= (static_cast<std::size_t>(own) == furthest) ? second_longest : longest;
        }

        // s: half the distance to each center's nearest other center
        std::fill(s.begin(), s.end(), kInf);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a + 1; b < k; ++b) {
                const double half = 0.5 * dist(centroids.center(a), centroids.center(b), ctr);
                ctr.dc_neighbor += 1;
                if (half < s[a]) s[a] = half;
                if (half < s[b]) s[b] = half;
            }
        }

        for (std::size_t i = 0; i < m; ++i) {
            const std::int32_t own = state.assign[i];
            const double bound = std::max(s[own], lower[i]);
            if (upper[i] <= bound) continue;

            const auto x = data.row(i);
            const double d_own = dist(x, centroids.center(own), ctr);
            ctr.dc_le += 1;
            upper[i] = d_own;
            if (upper[i] <= bound) continue;

            double best = d_own;
            double second = kInf;
            std::int32_t best_j = own;
            for (std::size_t j = 0; j < k; ++j) {
                if (static_cast<std::int32_t>(j) == own) continue;
                const double d = dist(x, centroids.center(j), ctr);
                if (d < best) {
                    second = best;
                    best = d;
                    best_j = static_cast<std::int32_t>(j);
                } else if (d < second) {
                    second = d;
                }
            }
            upper[i] = best;
            lower[i] = second;
            if (best_j != own) {
                move_point(state, data, i, best_j, best);
            } else {
                state.own_dist[i] = best;
            }
        }

        ++iterations;
        sol.telemetry.push_back(make_row(iterations, ctr.dc_full - dc_start, m, k,
                                         compute_sse(data, centroids, state.assign),
                                         hash_labels(state.assign)));
        if (params.on_assignments) params.on_assignments(iterations, state.assign);
    }

    sol.centroids = std::move(centroids);
    sol.assign = std::move(state.assign);
    sol.iterations = iterations;
    sol.sse = compute_sse(data, sol.centroids, sol.assign);
    return sol;
}

} // namespace gkmeans
