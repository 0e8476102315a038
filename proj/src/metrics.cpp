#include "gkmeans/metrics.hpp"
#include "gkmeans/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace gkmeans {

namespace {

using u128 = unsigned __int128;

u128 comb2(std::uint64_t n) { return n < 2 ? 0 : (u128)n * (n - 1) / 2; }

/// Compacts arbitrary labels to 0..p-1 in first-appearance order.
std::vector<std::int32_t> compact(std::span<const std::int32_t> labels, std::size_t& groups) {
    std::unordered_map<std::int32_t, std::int32_t> ids;
    std::vector<std::int32_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = ids.try_emplace(labels[i], static_cast<std::int32_t>(ids.size())).first;
        out[i] = it->second;
    }
    groups = ids.size();
    return out;
}

} // namespace

double sse(const DataMatrix& data, const CentroidSet& centroids,
           std::span<const std::int32_t> assign) {
    if (assign.size() != data.rows()) {
        throw std::invalid_argument("assignment length does not match point count");
    }
    for (std::int32_t a : assign) {
        if (a < 0 || static_cast<std::size_t>(a) >= centroids.k) {
            throw std::invalid_argument("label out of range: " + std::to_string(a));
        }
    }
    return compute_sse(data, centroids, assign);
}

double ari(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("label vectors differ in length");
    if (a.size() < 2) throw std::invalid_argument("ari needs at least 2 elements");

    std::size_t p = 0, q = 0;
    const std::vector<std::int32_t> la = compact(a, p);
    const std::vector<std::int32_t> lb = compact(b, q);

    std::vector<std::uint64_t> table(p * q, 0);
    std::vector<std::uint64_t> row_counts(p, 0), col_counts(q, 0);
    for (std::size_t i = 0; i < la.size(); ++i) {
        table[static_cast<std::size_t>(la[i]) * q + lb[i]] += 1;
        row_counts[la[i]] += 1;
        col_counts[lb[i]] += 1;
    }

    u128 index = 0;
    for (std::uint64_t n : table) index += comb2(n);
    u128 row_sum = 0, col_sum = 0;
    for (std::uint64_t n : row_counts) row_sum += comb2(n);
    for (std::uint64_t n : col_counts) col_sum += comb2(n);
    const u128 total = comb2(a.size());

    const long double expected =
        static_cast<long double>(row_sum) * static_cast<long double>(col_sum) /
        static_cast<long double>(total);
    const long double num = static_cast<long double>(index) - expected;
    const long double den =
        0.5L * (static_cast<long double>(row_sum) + static_cast<long double>(col_sum)) - expected;

    // num == den exactly covers identical partitions (ARI 1 by construction)
    // and the degenerate 0/0 cases, where both partitions are trivial.
    if (num == den) return 1.0;
    if (den == 0.0L) return 0.0;
    return static_cast<double>(num / den);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("series differ in length");
    if (xs.size() < 2) throw std::invalid_argument("pearson needs at least 2 samples");

    const double n = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= n;
    mean_y /= n;

    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0) {
        throw std::invalid_argument("pearson is undefined for a zero-variance series");
    }
    return cov / std::sqrt(var_x * var_y);
}

std::vector<SavingsRow> savings_report(std::span<const IterationTelemetry> telemetry,
                                       std::size_t m, std::size_t k) {
    std::vector<SavingsRow> rows;
    rows.reserve(telemetry.size());
    const double k2 = static_cast<double>(k) * static_cast<double>(k);
    for (const IterationTelemetry& t : telemetry) {
        SavingsRow r;
        r.iter = t.iter;
        r.neighbor_pairs = t.neighbor_pairs;
        r.neighborhood_fraction = static_cast<double>(t.neighbor_pairs) / k2;
        r.le_count = t.le_count;
        r.le_fraction = static_cast<double>(t.le_count) / static_cast<double>(m);
        r.lhe_count = t.lhe_count;
        r.he_count = t.he_count;
        r.pdc1 = t.pdc1;
        r.pdc2 = t.pdc2;
        if (t.pdc1 > 0) {
            r.le_savings_pct = (static_cast<double>(t.pdc1) - static_cast<double>(t.lhe_count)) /
                               static_cast<double>(t.pdc1) * 100.0;
        }
        if (t.pdc2 > 0) {
            r.he_savings_pct = (static_cast<double>(t.pdc2) - static_cast<double>(t.he_count)) /
                               static_cast<double>(t.pdc2) * 100.0;
        }
        rows.push_back(r);
    }
    return rows;
}

} // namespace gkmeans
