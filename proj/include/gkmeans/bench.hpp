#pragma once

#include "gkmeans/core.hpp"
#include "gkmeans/datagen.hpp"
#include "gkmeans/solvers.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gkmeans {

/// One benchmark input: either a CSV on disk or a generator preset.
struct DatasetSpec {
    std::string name;
    std::string path;                  // load this CSV when non-empty
    bool label_column = false;         // strip a trailing label column on load
    std::optional<MixtureSpec> preset; // generate when set
};

struct BenchConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<std::string> algorithms; // subset of {lloyd, gkmeans, hamerly}
    std::vector<std::size_t> k_values;
    int trials = 10;
    std::string init = "random"; // or "kmeanspp"
    int max_iters = 500;
    double epsilon = 0.0;
    std::uint64_t seed_base = 0;
    bool energy = false;
    std::string telemetry_dir; // per-trial telemetry CSVs land here when set
};

/// Parses and validates the JSON config; throws ConfigError on bad shape.
BenchConfig parse_bench_config(const std::string& json_text);
BenchConfig load_bench_config(const std::string& path);

struct BenchCell {
    std::string dataset;
    std::string algorithm;
    std::size_t k = 0;
    int n_trials = 0; // successful
    int failures = 0;
    double dc_mean = 0.0, dc_sd = 0.0;
    double rt_ms_mean = 0.0, rt_ms_sd = 0.0;
    double iters_mean = 0.0;
    double sse_mean = 0.0;
    std::optional<double> dc_savings_pct;  // vs the lloyd cell of the same group
    std::optional<double> rt_speedup_pct;
    std::optional<double> energy_cpu_j; // package domain, mean over trials
    std::optional<double> energy_mem_j; // dram domain
    std::vector<std::string> telemetry_files;
    std::string error; // dataset/config failure note; cell carries no stats then
};

struct BenchReport {
    std::string config_echo_json;
    std::string energy_note; // set when energy was requested but unavailable
    std::vector<BenchCell> cells;
};

/// Runs the full trial matrix. Within a trial every algorithm consumes the
/// identical initial centroids; wall time wraps the solver call only.
/// Unreadable datasets and solver failures become per-cell records, never
/// aborts.
BenchReport run_benchmark(const BenchConfig& config);

std::string report_to_json_string(const BenchReport& report);
void write_report_json(const BenchReport& report, const std::string& path);
void write_report_csv(const BenchReport& report, const std::string& path);

/// Per-seed outcome of the exactness check between solvers started from
/// identical centroids. Divergences are findings, not errors.
struct SeedVerdict {
    std::uint64_t seed = 0;
    bool gk_sequence_identical = false;
    int gk_first_divergent_iter = -1; // 1-based; -1 when none
    double gk_ari = 0.0;
    double gk_sse_diff = 0.0;
    bool hamerly_checked = false;
    bool hamerly_sequence_identical = true;
    int hamerly_first_divergent_iter = -1;
    double hamerly_ari = 1.0;
    double hamerly_sse_diff = 0.0;

    bool passed() const;
};

struct SymmetryVerdict {
    std::vector<SeedVerdict> seeds;
    bool all_passed() const;
};

SymmetryVerdict verify_symmetry(const DataMatrix& data, std::size_t k,
                                std::span<const std::uint64_t> seeds,
                                const std::string& init_method, bool include_hamerly,
                                const SolverParams& base_params);

std::string verdict_to_json_string(const SymmetryVerdict& verdict);

} // namespace gkmeans
