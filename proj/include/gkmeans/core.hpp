#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gkmeans {

/// Counters for the work a solver performs. A "DC" (distance computation) is
/// one full d-dimensional Euclidean distance evaluation between two vectors;
/// affine-product sign tests are tracked separately because they are the whole
/// point of the geometric filter.
struct OpCounters {
    std::uint64_t dc_full = 0;     ///< every counted distance evaluation
    std::uint64_t dc_le = 0;       ///< subset of dc_full: own-centroid / LE-check distances
    std::uint64_t dc_neighbor = 0; ///< subset of dc_full: inter-centroid distances
    std::uint64_t proj_count = 0;  ///< affine-product sign tests (no sqrt involved)
};

namespace detail {
[[noreturn]] void throw_dim_mismatch(std::size_t a, std::size_t b);

inline void check_same_dim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw_dim_mismatch(a.size(), b.size());
}
} // namespace detail

/// Squared Euclidean distance. Does NOT count as a DC; callers that report a
/// DC either use dist() or bump the counter themselves.
/// Throws std::invalid_argument on dimension mismatch.
inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    detail::check_same_dim(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

/// Euclidean distance; increments counters.dc_full by exactly one.
inline double dist(std::span<const double> a, std::span<const double> b,
                   OpCounters& counters) {
    const double s = sq_dist(a, b);
    counters.dc_full += 1;
    return std::sqrt(s);
}

/// Componentwise mean of two points.
inline std::vector<double> midpoint(std::span<const double> a, std::span<const double> b) {
    detail::check_same_dim(a, b);
    std::vector<double> mid(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        mid[i] = 0.5 * (a[i] + b[i]);
    }
    return mid;
}

/// Scalar-projection sign test: true iff (x - mid) . affine > 0 (strict),
/// i.e. x lies strictly on the far side of the bisecting hyperplane through
/// mid. `affine` must be the precomputed vector from mid to the neighbor
/// centroid. Increments proj_count, never dc_full. A point exactly on the
/// hyperplane (dot == 0) is not flagged, so it keeps its assignment.
inline bool he_test(std::span<const double> mid, std::span<const double> affine,
                    std::span<const double> x, OpCounters& counters) {
    detail::check_same_dim(mid, affine);
    detail::check_same_dim(mid, x);
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += (x[i] - mid[i]) * affine[i];
    }
    counters.proj_count += 1;
    return dot > 0.0;
}

/// Row-major dataset: m points of dimension d.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(std::size_t rows, std::size_t dim)
        : m_(rows), d_(dim), values_(rows * dim, 0.0) {}

    std::size_t rows() const { return m_; }
    std::size_t dim() const { return d_; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * d_, d_};
    }
    std::span<double> row(std::size_t i) {
        return {values_.data() + i * d_, d_};
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Throws ParseError naming the first non-finite cell, if any.
    void validate_finite() const;

private:
    std::size_t m_ = 0;
    std::size_t d_ = 0;
    std::vector<double> values_;
};

} // namespace gkmeans
