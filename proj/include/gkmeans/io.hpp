#pragma once

#include "gkmeans/core.hpp"
#include "gkmeans/metrics.hpp"
#include "gkmeans/solvers_types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gkmeans::io {

/// Headerless comma-separated numeric matrix, one point per row. When
/// strip_last_label is set the final column is returned separately as integer
/// labels instead of data. Throws ParseError naming the offending row/column
/// for non-numeric or non-finite cells, ragged rows or an empty file.
struct LoadedMatrix {
    DataMatrix data;
    std::optional<std::vector<std::int32_t>> labels;
};

LoadedMatrix read_matrix_csv(const std::string& path, bool strip_last_label = false);

/// Values go out with 17 significant digits so a write/read round trip is
/// lossless. An optional label vector is appended as a trailing column.
void write_matrix_csv(const std::string& path, const DataMatrix& data,
                      const std::vector<std::int32_t>* labels = nullptr);

void write_labels_csv(const std::string& path, std::span<const std::int32_t> labels);

void write_centroids_csv(const std::string& path, const CentroidSet& centroids);

void write_telemetry_csv(const std::string& path,
                         std::span<const IterationTelemetry> telemetry);

/// Savings percentages that have no denominator come out as empty cells.
void write_savings_csv(const std::string& path, std::span<const SavingsRow> rows);

std::string format_double(double v); // %.17g

} // namespace gkmeans::io
