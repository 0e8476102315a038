#pragma once

#include "gkmeans/core.hpp"
#include "gkmeans/solvers_types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gkmeans {

using LabelVector = std::vector<std::int32_t>;

/// Sum of squared point-to-own-centroid distances. Diagnostic: never touches
/// DC counters. Throws std::invalid_argument for out-of-range labels.
double sse(const DataMatrix& data, const CentroidSet& centroids,
           std::span<const std::int32_t> assign);

/// Adjusted Rand index in [-1, 1]; 1 for identical partitions up to label
/// permutation, expectation 0 under independent random labelings. Pair
/// counting uses 128-bit accumulation so datasets in the tens of millions of
/// points cannot overflow.
double ari(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

/// Sample Pearson correlation. Throws std::invalid_argument when either
/// series is constant (zero variance) or shorter than 2.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// One row of the per-iteration savings table. Savings percentages are
/// absent (not NaN) when their denominator is zero.
struct SavingsRow {
    int iter = 0;
    std::uint64_t neighbor_pairs = 0;
    double neighborhood_fraction = 0.0; // neighbor_pairs / k^2
    std::uint64_t le_count = 0;
    double le_fraction = 0.0;
    std::uint64_t lhe_count = 0;
    std::uint64_t he_count = 0;
    std::uint64_t pdc1 = 0;
    std::uint64_t pdc2 = 0;
    std::optional<double> le_savings_pct; // (pdc1 - lhe) / pdc1 * 100
    std::optional<double> he_savings_pct; // (pdc2 - he) / pdc2 * 100
};

std::vector<SavingsRow> savings_report(std::span<const IterationTelemetry> telemetry,
                                       std::size_t m, std::size_t k);

} // namespace gkmeans
