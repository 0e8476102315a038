#include "gkmeans/io.hpp"
#include "gkmeans/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gkmeans::io {

namespace {

std::string read_whole_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
    // from_chars does not skip whitespace; trim what spreadsheets tend to add
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
        cell.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError("non-numeric cell at row " + std::to_string(row + 1) + ", column " +
                         std::to_string(col + 1));
    }
    if (!std::isfinite(value)) {
        throw ParseError("non-finite value at row " + std::to_string(row + 1) + ", column " +
                         std::to_string(col + 1));
    }
    return value;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LoadedMatrix read_matrix_csv(const std::string& path, bool strip_last_label) {
    const std::string text = read_whole_file(path);

    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = end + 1;
        if (line.empty()) continue;

        std::vector<double> values;
        std::size_t cell_start = 0;
        const std::size_t row_idx = rows.size();
        while (true) {
            std::size_t comma = line.find(',', cell_start);
            const std::string_view cell = line.substr(
                cell_start, comma == std::string_view::npos ? std::string_view::npos
                                                            : comma - cell_start);
            values.push_back(parse_cell(cell, row_idx, values.size()));
            if (comma == std::string_view::npos) break;
            cell_start = comma + 1;
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw ParseError("row " + std::to_string(row_idx + 1) + " has " +
                             std::to_string(values.size()) + " columns, expected " +
                             std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(values));
    }

    if (rows.empty()) throw ParseError("no rows in '" + path + "'");

    std::size_t dim = rows.front().size();
    if (strip_last_label) {
        if (dim < 2) throw ParseError("cannot strip a label column from a 1-column file");
        dim -= 1;
    }

    LoadedMatrix out;
    out.data = DataMatrix(rows.size(), dim);
    if (strip_last_label) out.labels.emplace(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto dst = out.data.row(i);
        for (std::size_t j = 0; j < dim; ++j) dst[j] = rows[i][j];
        if (strip_last_label) {
            (*out.labels)[i] = static_cast<std::int32_t>(rows[i][dim]);
        }
    }
    return out;
}

void write_matrix_csv(const std::string& path, const DataMatrix& data,
                      const std::vector<std::int32_t>* labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << format_double(row[j]);
        }
        if (labels) out << ',' << (*labels)[i];
        out << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

void write_labels_csv(const std::string& path, std::span<const std::int32_t> labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    for (std::int32_t v : labels) out << v << '\n';
    if (!out) throw ParseError("write failed for '" + path + "'");
}

void write_centroids_csv(const std::string& path, const CentroidSet& centroids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    for (std::size_t j = 0; j < centroids.k; ++j) {
        const auto c = centroids.center(j);
        for (std::size_t t = 0; t < c.size(); ++t) {
            if (t) out << ',';
            out << format_double(c[t]);
        }
        out << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

void write_telemetry_csv(const std::string& path,
                         std::span<const IterationTelemetry> telemetry) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "iter,neighbor_pairs,le_count,lhe_count,he_count,dc_this_iter,"
           "pdc1,pdc2,sse_after_update,assign_hash\n";
    for (const IterationTelemetry& t : telemetry) {
        out << t.iter << ',' << t.neighbor_pairs << ',' << t.le_count << ',' << t.lhe_count
            << ',' << t.he_count << ',' << t.dc_this_iter << ',' << t.pdc1 << ',' << t.pdc2
            << ',' << format_double(t.sse_after_update) << ',' << t.assign_hash << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

void write_savings_csv(const std::string& path, std::span<const SavingsRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "iter,neighbor_pairs,neighborhood_fraction,le_count,le_fraction,lhe_count,"
           "he_count,pdc1,pdc2,le_savings_pct,he_savings_pct\n";
    for (const SavingsRow& r : rows) {
        out << r.iter << ',' << r.neighbor_pairs << ','
            << format_double(r.neighborhood_fraction) << ',' << r.le_count << ','
            << format_double(r.le_fraction) << ',' << r.lhe_count << ',' << r.he_count << ','
            << r.pdc1 << ',' << r.pdc2 << ',';
        if (r.le_savings_pct) out << format_double(*r.le_savings_pct);
        out << ',';
        if (r.he_savings_pct) out << format_double(*r.he_savings_pct);
        out << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

} // namespace gkmeans::io
