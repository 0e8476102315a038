#pragma once

#include "gkmeans/core.hpp"

#include <cstdint>
#include <vector>

namespace gkmeans {

/// Balanced Gaussian mixture: k clusters of per_cluster points each, cluster
/// j's mean sitting at j * mean_separation on every axis, diagonal covariance
/// with a per-cluster-per-axis variance drawn uniformly from
/// [cov_low, cov_high].
///
/// All randomness is a counter-based stream: chained splitmix64 over
/// (seed, tag, indices) feeding Box-Muller for the normal deviates, so the
/// output is byte-identical for a given spec and any row can be generated
/// independently. Cross-implementation byte-equality is not promised.
struct MixtureSpec {
    std::size_t k = 1;
    std::size_t per_cluster = 1;
    std::size_t d = 1;
    double mean_separation = 3.0;
    double cov_low = 1.0;
    double cov_high = 5.0;
    std::uint64_t seed = 0;
};

/// Low-overlap preset: means 3 units apart per axis, variances in [1, 5].
MixtureSpec separated_preset(std::size_t k, std::size_t per_cluster, std::size_t d,
                             std::uint64_t seed);

/// High-overlap preset: separation reduced from 3 by 1.5 and then 0.5 (to
/// 1 unit), variances in [8, 15].
MixtureSpec overlapped_preset(std::size_t k, std::size_t per_cluster, std::size_t d,
                              std::uint64_t seed);

struct GeneratedData {
    DataMatrix data;
    std::vector<std::int32_t> labels;
};

GeneratedData generate_gaussian_mixture(const MixtureSpec& spec);

/// The standard deviation the generator used for (cluster, axis); exposed so
/// statistical checks can use the exact sigma.
double axis_sigma(const MixtureSpec& spec, std::size_t cluster, std::size_t axis);

} // namespace gkmeans
