#include "gkmeans/datagen.hpp"
#include "gkmeans/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gkmeans {

namespace {

constexpr std::uint64_t kVarianceTag = 0x76617269616e6365ull; // "variance"
constexpr std::uint64_t kNoiseTag = 0x6e6f697365303030ull;    // "noise000"

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t stream_u64(std::uint64_t seed, std::uint64_t tag, std::uint64_t w1,
                         std::uint64_t w2, std::uint64_t w3) {
    std::uint64_t h = splitmix64(seed ^ tag);
    h = splitmix64(h + w1);
    h = splitmix64(h + w2);
    h = splitmix64(h + w3);
    return h;
}

double unit_open_closed(std::uint64_t x) { // (0, 1]
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

double unit_closed_open(std::uint64_t x) { // [0, 1)
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// One standard normal deviate for (seed, row, axis) via Box-Muller.
double normal_deviate(std::uint64_t seed, std::uint64_t row, std::uint64_t axis) {
    const double u1 = unit_open_closed(stream_u64(seed, kNoiseTag, row, axis, 0));
    const double u2 = unit_closed_open(stream_u64(seed, kNoiseTag, row, axis, 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double axis_variance(const MixtureSpec& spec, std::size_t cluster, std::size_t axis) {
    const double u = unit_closed_open(stream_u64(spec.seed, kVarianceTag, cluster, axis, 0));
    return spec.cov_low + (spec.cov_high - spec.cov_low) * u;
}

void validate(const MixtureSpec& spec) {
    if (spec.k < 1) throw ConfigError("mixture needs k >= 1");
    if (spec.per_cluster < 1) throw ConfigError("mixture needs per_cluster >= 1");
    if (spec.d < 1) throw ConfigError("mixture needs d >= 1");
    if (spec.cov_low > spec.cov_high) throw ConfigError("cov_low must be <= cov_high");
    if (spec.cov_low < 0.0) throw ConfigError("variances must be >= 0");
    if (spec.mean_separation < 0.0) throw ConfigError("mean_separation must be >= 0");
}

} // namespace

MixtureSpec separated_preset(std::size_t k, std::size_t per_cluster, std::size_t d,
                             std::uint64_t seed) {
    return MixtureSpec{k, per_cluster, d, 3.0, 1.0, 5.0, seed};
}

MixtureSpec overlapped_preset(std::size_t k, std::size_t per_cluster, std::size_t d,
                              std::uint64_t seed) {
    return MixtureSpec{k, per_cluster, d, 1.0, 8.0, 15.0, seed};
}

GeneratedData generate_gaussian_mixture(const MixtureSpec& spec) {
    validate(spec);
    const std::size_t m = spec.k * spec.per_cluster;

    GeneratedData out;
    out.data = DataMatrix(m, spec.d);
    out.labels.resize(m);

    std::vector<double> sigma(spec.k * spec.d);
    for (std::size_t j = 0; j < spec.k; ++j) {
        for (std::size_t a = 0; a < spec.d; ++a) {
            sigma[j * spec.d + a] = std::sqrt(axis_variance(spec, j, a));
        }
    }

    for (std::size_t j = 0; j < spec.k; ++j) {
        const double mean = static_cast<double>(j) * spec.mean_separation;
        for (std::size_t p = 0; p < spec.per_cluster; ++p) {
            const std::size_t row = j * spec.per_cluster + p;
            out.labels[row] = static_cast<std::int32_t>(j);
            auto r = out.data.row(row);
            for (std::size_t a = 0; a < spec.d; ++a) {
                r[a] = mean + sigma[j * spec.d + a] * normal_deviate(spec.seed, row, a);
            }
        }
    }
    return out;
}

double axis_sigma(const MixtureSpec& spec, std::size_t cluster, std::size_t axis) {
    return std::sqrt(axis_variance(spec, cluster, axis));
}

} // namespace gkmeans
