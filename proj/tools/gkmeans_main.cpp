// Command-line front end: generate / run / bench / verify.
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 I/O or parse error.

#include "gkmeans/bench.hpp"
#include "gkmeans/datagen.hpp"
#include "gkmeans/energy.hpp"
#include "gkmeans/errors.hpp"
#include "gkmeans/io.hpp"
#include "gkmeans/metrics.hpp"
#include "gkmeans/solvers.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

namespace {

using namespace gkmeans;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct GenerateArgs {
    std::string preset;
    std::size_t k = 4;
    std::size_t per_cluster = 250;
    std::size_t d = 2;
    double separation = 3.0;
    double cov_low = 1.0;
    double cov_high = 5.0;
    std::uint64_t seed = 0;
    std::string out = "mixture";
    bool embed_labels = false;
};

int cmd_generate(const GenerateArgs& a) {
    MixtureSpec spec;
    if (a.preset == "separated") {
        spec = separated_preset(a.k, a.per_cluster, a.d, a.seed);
    } else if (a.preset == "overlapped") {
        spec = overlapped_preset(a.k, a.per_cluster, a.d, a.seed);
    } else if (a.preset.empty()) {
        spec = MixtureSpec{a.k, a.per_cluster, a.d, a.separation, a.cov_low, a.cov_high, a.seed};
    } else {
        throw ConfigError("unknown preset '" + a.preset + "'");
    }

    const GeneratedData gen = generate_gaussian_mixture(spec);
    if (a.embed_labels) {
        io::write_matrix_csv(a.out + ".csv", gen.data, &gen.labels);
    } else {
        io::write_matrix_csv(a.out + ".csv", gen.data);
        io::write_labels_csv(a.out + ".labels.csv", gen.labels);
    }
    std::cout << "wrote " << gen.data.rows() << " points, d=" << gen.data.dim()
              << ", k=" << spec.k << " -> " << a.out << ".csv\n";
    return kExitOk;
}

struct RunArgs {
    std::string input;
    std::string label_column;
    std::size_t k = 0;
    std::string algorithm = "gkmeans";
    std::string init = "random";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int max_iters = 500;
    double epsilon = 0.0;
    std::string out = "run";
};

int cmd_run(const RunArgs& a) {
    const io::LoadedMatrix loaded = io::read_matrix_csv(a.input, a.label_column == "last");
    const DataMatrix& data = loaded.data;
    data.validate_finite();

    std::uint64_t seed = a.seed;
    if (!a.seed_given) {
        seed = static_cast<std::uint64_t>(
            std::chrono::steady_clock::now().time_since_epoch().count());
        std::cout << "note: no --seed given, using time-derived seed " << seed << "\n";
    }

    OpCounters init_counters;
    const CentroidSet init = a.init == "kmeanspp" ? init_kmeanspp(data, a.k, seed, init_counters)
                                                  : init_random(data, a.k, seed);
    SolverParams params;
    params.max_iters = a.max_iters;
    params.epsilon = a.epsilon;
    params.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    Solution sol;
    if (a.algorithm == "lloyd") {
        sol = run_lloyd(data, init, params);
    } else if (a.algorithm == "gkmeans") {
        sol = run_gkmeans(data, init, params);
    } else if (a.algorithm == "hamerly") {
        sol = run_hamerly(data, init, params);
    } else {
        throw ConfigError("unknown algorithm '" + a.algorithm + "'");
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    io::write_labels_csv(a.out + ".assign.csv", sol.assign);
    io::write_centroids_csv(a.out + ".centroids.csv", sol.centroids);
    io::write_telemetry_csv(a.out + ".telemetry.csv", sol.telemetry);
    if (a.algorithm == "gkmeans") {
        io::write_savings_csv(a.out + ".savings.csv",
                              savings_report(sol.telemetry, data.rows(), a.k));
    }

    json summary;
    summary["iterations"] = sol.iterations;
    summary["sse"] = sol.sse;
    summary["dc_total"] = sol.counters.dc_full;
    summary["dc_breakdown"] = {{"full", sol.counters.dc_full},
                               {"le", sol.counters.dc_le},
                               {"neighbor", sol.counters.dc_neighbor},
                               {"proj_count", sol.counters.proj_count}};
    summary["elapsed_ms"] = elapsed_ms;
    std::ofstream out(a.out + ".summary.json");
    if (!out) throw ParseError("cannot write '" + a.out + ".summary.json'");
    out << summary.dump(2) << '\n';

    std::cout << a.algorithm << ": " << sol.iterations << " iterations, sse="
              << io::format_double(sol.sse) << ", dc=" << sol.counters.dc_full << ", "
              << io::format_double(elapsed_ms) << " ms\n";
    return kExitOk;
}

struct BenchArgs {
    std::string config;
    std::string out = "bench_report";
};

int cmd_bench(const BenchArgs& a) {
    const BenchConfig config = load_bench_config(a.config);
    const BenchReport report = run_benchmark(config);
    write_report_json(report, a.out + ".json");
    write_report_csv(report, a.out + ".csv");
    std::cout << "wrote " << a.out << ".json and " << a.out << ".csv ("
              << report.cells.size() << " cells)\n";
    if (!report.energy_note.empty()) {
        std::cout << "energy sampling unavailable: " << report.energy_note << "\n";
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string input;
    std::string label_column;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    int n_seeds = 20;
    std::string init = "random";
    bool include_hamerly = false;
    int max_iters = 500;
    double epsilon = 0.0;
    std::string out;
    bool hook_mismatched_tie_break = false;
};

int cmd_verify(const VerifyArgs& a) {
    if (a.n_seeds < 1) throw ConfigError("--seeds must be >= 1");
    const io::LoadedMatrix loaded = io::read_matrix_csv(a.input, a.label_column == "last");
    loaded.data.validate_finite();

    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(a.n_seeds));
    for (int i = 0; i < a.n_seeds; ++i) seeds[i] = a.seed + static_cast<std::uint64_t>(i);

    SolverParams base;
    base.max_iters = a.max_iters;
    base.epsilon = a.epsilon;
    base.prefer_new_on_tie = a.hook_mismatched_tie_break;

    const SymmetryVerdict verdict =
        verify_symmetry(loaded.data, a.k, seeds, a.init, a.include_hamerly, base);

    for (const SeedVerdict& s : verdict.seeds) {
        std::cout << "seed " << s.seed << ": " << (s.passed() ? "pass" : "FAIL")
                  << " (ari=" << s.gk_ari << ", sse_diff=" << s.gk_sse_diff;
        if (s.gk_first_divergent_iter != -1) {
            std::cout << ", first divergent iteration " << s.gk_first_divergent_iter;
        }
        if (s.hamerly_checked) {
            std::cout << ", hamerly " << (s.hamerly_sequence_identical ? "ok" : "DIVERGED");
        }
        std::cout << ")\n";
    }
    const std::string js = verdict_to_json_string(verdict);
    if (!a.out.empty()) {
        std::ofstream out(a.out);
        if (!out) throw ParseError("cannot write '" + a.out + "'");
        out << js << '\n';
    } else {
        std::cout << js << '\n';
    }
    std::cout << (verdict.all_passed() ? "verdict: all seeds pass\n"
                                       : "verdict: symmetry violated\n");
    return verdict.all_passed() ? kExitOk : kExitVerifyFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact accelerated k-means toolkit: geometric filtering, Hamerly bounds, "
                 "Lloyd baseline, with distance-computation accounting"};
    app.require_subcommand(1);

    GenerateArgs gen;
    CLI::App* generate = app.add_subcommand("generate", "Write a synthetic Gaussian mixture CSV");
    generate->add_option("--preset", gen.preset, "separated (3 units apart, var 1-5) or overlapped (1 unit, var 8-15)");
    generate->add_option("--k", gen.k, "number of clusters")->required();
    generate->add_option("--per-cluster", gen.per_cluster, "points per cluster")->required();
    generate->add_option("--d", gen.d, "dimension")->required();
    generate->add_option("--separation", gen.separation, "mean separation per axis (ignored with --preset)");
    generate->add_option("--cov-low", gen.cov_low, "variance range low (ignored with --preset)");
    generate->add_option("--cov-high", gen.cov_high, "variance range high (ignored with --preset)");
    generate->add_option("--seed", gen.seed, "generator seed")->required();
    generate->add_option("--out", gen.out, "output prefix")->required();
    generate->add_flag("--embed-labels", gen.embed_labels,
                       "append labels as a trailing column instead of a separate file");

    RunArgs run;
    CLI::App* runc = app.add_subcommand("run", "Cluster a CSV with one algorithm");
    runc->add_option("--input", run.input, "headerless numeric CSV")->required();
    runc->add_option("--label-column", run.label_column, "strip a label column ('last' only)")
        ->check(CLI::IsMember({"last"}));
    runc->add_option("--k", run.k, "number of clusters")->required();
    runc->add_option("--algorithm", run.algorithm, "lloyd | gkmeans | hamerly")
        ->check(CLI::IsMember({"lloyd", "gkmeans", "hamerly"}));
    runc->add_option("--init", run.init, "random | kmeanspp")
        ->check(CLI::IsMember({"random", "kmeanspp"}));
    auto* seed_opt = runc->add_option("--seed", run.seed, "reproducibility seed");
    runc->add_option("--max-iters", run.max_iters, "iteration cap");
    runc->add_option("--epsilon", run.epsilon, "convergence threshold on max centroid movement");
    runc->add_option("--out", run.out, "output prefix")->required();

    BenchArgs bench;
    CLI::App* benchc = app.add_subcommand("bench", "Run a trial matrix from a JSON config");
    benchc->add_option("--config", bench.config, "JSON benchmark config")->required();
    benchc->add_option("--out", bench.out, "report prefix");

    VerifyArgs verify;
    CLI::App* verifyc = app.add_subcommand("verify", "Check solver exactness from shared inits");
    verifyc->add_option("--input", verify.input, "headerless numeric CSV")->required();
    verifyc->add_option("--label-column", verify.label_column, "strip a label column ('last' only)")
        ->check(CLI::IsMember({"last"}));
    verifyc->add_option("--k", verify.k, "number of clusters")->required();
    verifyc->add_option("--seed", verify.seed, "base seed; seeds are seed..seed+n-1")->required();
    verifyc->add_option("--seeds", verify.n_seeds, "number of seeds (default 20)");
    verifyc->add_option("--init", verify.init, "random | kmeanspp")
        ->check(CLI::IsMember({"random", "kmeanspp"}));
    verifyc->add_flag("--include-hamerly", verify.include_hamerly, "also check hamerly");
    verifyc->add_option("--max-iters", verify.max_iters, "iteration cap");
    verifyc->add_option("--epsilon", verify.epsilon, "convergence threshold");
    verifyc->add_option("--out", verify.out, "write the JSON verdict here instead of stdout");
    verifyc->add_flag("--hook-mismatched-tie-break", verify.hook_mismatched_tie_break)
        ->group(""); // test hook, hidden from help

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen);
        if (runc->parsed()) {
            run.seed_given = seed_opt->count() > 0;
            return cmd_run(run);
        }
        if (benchc->parsed()) return cmd_bench(bench);
        if (verifyc->parsed()) return cmd_verify(verify);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
