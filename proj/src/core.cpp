#include "gkmeans/core.hpp"
#include "gkmeans/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gkmeans {

namespace detail {
void throw_dim_mismatch(std::size_t a, std::size_t b) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
}
} // namespace detail

void DataMatrix::validate_finite() const {
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < d_; ++j) {
            if (!std::isfinite(values_[i * d_ + j])) {
                throw ParseError("non-finite value at row " + std::to_string(i + 1) +
                                 ", column " + std::to_string(j + 1));
            }
        }
    }
}

} // namespace gkmeans
