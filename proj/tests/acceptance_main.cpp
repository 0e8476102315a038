// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits non-zero when any fail.
//
// argv[1] (optional): path to the CLI binary, needed by the end-to-end check.

#include "gkmeans/bench.hpp"
#include "gkmeans/datagen.hpp"
#include "gkmeans/io.hpp"
#include "gkmeans/metrics.hpp"
#include "gkmeans/solvers.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace gkmeans;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& label, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s  criterion %2d: %s (%.1f s)%s%s\n", pass ? "PASS" : "FAIL", id,
                label.c_str(), seconds, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

// ---------------------------------------------------------------------------
// Criteria 1, 2, 3, 8: one shared randomized configuration sweep.

struct SuiteTallies {
    int configs = 0;
    int gk_sequence_mismatches = 0;
    int gk_ari_not_one = 0;
    int gk_sse_diff_not_zero = 0;
    int ham_sequence_mismatches = 0;
    int ham_ari_not_one = 0;
    int ham_sse_diff_not_zero = 0;
    long long monotonicity_violations = 0;
    long long telemetry_violations = 0;
    long long gk_iterations_checked = 0;
};

void check_monotone(const Solution& sol, SuiteTallies& t) {
    for (std::size_t i = 0; i + 1 < sol.telemetry.size(); ++i) {
        const double prev = sol.telemetry[i].sse_after_update;
        const double next = sol.telemetry[i + 1].sse_after_update;
        if (!(next <= prev * (1.0 + 1e-9) + 1e-12)) t.monotonicity_violations += 1;
    }
}

void check_gk_telemetry(const Solution& sol, std::size_t m, std::size_t k, SuiteTallies& t) {
    for (const IterationTelemetry& row : sol.telemetry) {
        t.gk_iterations_checked += 1;
        const bool ok = row.he_count <= row.lhe_count && row.lhe_count <= m - row.le_count &&
                        row.pdc1 == (m - row.le_count) * k && row.pdc2 == row.lhe_count * k &&
                        row.neighbor_pairs <= k * (k - 1);
        if (!ok) t.telemetry_violations += 1;
    }
}

SuiteTallies run_symmetry_suite() {
    SuiteTallies t;
    std::uint64_t config_seed = 20000;

    for (std::size_t m_total : {1000u, 10000u}) {
        for (std::size_t d : {2u, 16u, 50u}) {
            for (std::size_t k : {5u, 20u, 50u}) {
                const std::size_t per_cluster = m_total / k;
                for (bool overlapped : {false, true}) {
                    const MixtureSpec spec = overlapped
                                                 ? overlapped_preset(k, per_cluster, d, config_seed)
                                                 : separated_preset(k, per_cluster, d, config_seed);
                    ++config_seed;
                    const DataMatrix data = generate_gaussian_mixture(spec).data;

                    for (const char* init_method : {"random", "kmeanspp"}) {
                        ++t.configs;
                        OpCounters init_ctr;
                        const CentroidSet init =
                            std::string(init_method) == "kmeanspp"
                                ? init_kmeanspp(data, k, config_seed, init_ctr)
                                : init_random(data, k, config_seed);

                        SolverParams params;
                        params.max_iters = m_total >= 10000 ? 40 : 60;

                        std::vector<std::vector<std::int32_t>> reference;
                        SolverParams lp = params;
                        lp.on_assignments = [&](int, std::span<const std::int32_t> a) {
                            reference.emplace_back(a.begin(), a.end());
                        };
                        const Solution lloyd = run_lloyd(data, init, lp);
                        check_monotone(lloyd, t);

                        auto compare = [&reference](const SolverParams& base, bool& identical) {
                            SolverParams p = base;
                            p.on_assignments = [&reference, &identical](
                                                   int iter, std::span<const std::int32_t> a) {
                                const std::size_t idx = static_cast<std::size_t>(iter) - 1;
                                if (idx >= reference.size() ||
                                    !std::equal(a.begin(), a.end(), reference[idx].begin(),
                                                reference[idx].end())) {
                                    identical = false;
                                }
                            };
                            return p;
                        };

                        bool gk_identical = true;
                        const Solution gk = run_gkmeans(data, init, compare(params, gk_identical));
                        gk_identical =
                            gk_identical && gk.iterations == static_cast<int>(reference.size());
                        if (!gk_identical) t.gk_sequence_mismatches += 1;
                        if (ari(lloyd.assign, gk.assign) != 1.0) t.gk_ari_not_one += 1;
                        if (gk.sse - lloyd.sse != 0.0) t.gk_sse_diff_not_zero += 1;
                        check_monotone(gk, t);
                        check_gk_telemetry(gk, data.rows(), k, t);

                        bool ham_identical = true;
                        const Solution ham =
                            run_hamerly(data, init, compare(params, ham_identical));
                        ham_identical =
                            ham_identical && ham.iterations == static_cast<int>(reference.size());
                        if (!ham_identical) t.ham_sequence_mismatches += 1;
                        if (ari(lloyd.assign, ham.assign) != 1.0) t.ham_ari_not_one += 1;
                        if (ham.sse - lloyd.sse != 0.0) t.ham_sse_diff_not_zero += 1;
                        check_monotone(ham, t);
                    }
                }
            }
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Criterion 4: DC reduction on the separated reference workload.

void criterion_dc_reduction() {
    Stopwatch sw;
    const std::size_t k = 50;
    const MixtureSpec spec = separated_preset(k, 1000, 16, 321); // m = 5e4, d = 16
    const DataMatrix data = generate_gaussian_mixture(spec).data;

    SolverParams params;
    params.max_iters = 100;

    std::uint64_t lloyd_dc = 0, gk_dc = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const CentroidSet init = init_random(data, k, 9000 + trial);
        lloyd_dc += run_lloyd(data, init, params).counters.dc_full;
        gk_dc += run_gkmeans(data, init, params).counters.dc_full;
    }
    const double ratio = static_cast<double>(gk_dc) / static_cast<double>(lloyd_dc);
    std::ostringstream detail;
    detail << "gk dc " << gk_dc << " vs lloyd dc " << lloyd_dc << " = "
           << std::round(ratio * 10000.0) / 100.0 << "% (threshold 15%)";
    report(4, "gkmeans total DC <= 15% of lloyd (m=5e4, d=16, k=50, 10 trials)",
           ratio <= 0.15, detail.str(), sw.seconds());
}

// ---------------------------------------------------------------------------
// Criterion 5: geometric predicate vs squared-distance comparison.

void criterion_he_oracle() {
    Stopwatch sw;
    std::mt19937_64 rng(777);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> log_scale(-2.0, 2.0);

    long long checked = 0, mismatches = 0;
    for (std::size_t d : {1u, 2u, 8u, 64u}) {
        std::vector<double> ci(d), cj(d), x(d), mid(d), affine(d);
        for (int trial = 0; trial < 250000; ++trial) {
            const double scale = std::pow(10.0, log_scale(rng));
            for (std::size_t t = 0; t < d; ++t) {
                ci[t] = gauss(rng) * scale;
                cj[t] = gauss(rng) * scale;
                x[t] = gauss(rng) * scale;
            }
            const double di = sq_dist(x, ci);
            const double dj = sq_dist(x, cj);
            if (std::abs(di - dj) <= 1e-9 * (1.0 + di)) continue;

            for (std::size_t t = 0; t < d; ++t) {
                mid[t] = 0.5 * (ci[t] + cj[t]);
                affine[t] = cj[t] - mid[t];
            }
            OpCounters ctr;
            ++checked;
            if (he_test(mid, affine, x, ctr) != (dj < di)) ++mismatches;
        }
    }
    std::ostringstream detail;
    detail << checked << " guarded triples of 1e6, " << mismatches << " mismatches";
    report(5, "scalar-projection test agrees with the squared-distance comparison",
           mismatches == 0, detail.str(), sw.seconds());
}

// ---------------------------------------------------------------------------
// Criteria 6 and 7: LE safety and neighbor-pruning safety on small instances.

void criterion_le_and_pruning_safety() {
    Stopwatch sw6;
    std::mt19937_64 rng(31337);

    long long le_checked = 0, le_violations = 0;
    long long prune_checked = 0, prune_violations = 0;

    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t k = 2 + rng() % 9;           // <= 10
        const std::size_t per = 1 + rng() % (200 / k); // m = k * per <= 200
        const std::size_t d = 1 + rng() % 8;
        const bool overlapped = rng() % 2 == 0;
        const MixtureSpec spec = overlapped ? overlapped_preset(k, per, d, rng())
                                            : separated_preset(k, per, d, rng());
        const DataMatrix data = generate_gaussian_mixture(spec).data;
        const CentroidSet init = init_random(data, k, rng());

        SolverParams params;
        params.max_iters = 200;
        params.inspect = [&](const IterationView& view) {
            const std::size_t kk = view.centroids.k;
            for (std::size_t i = 0; i < view.data.rows(); ++i) {
                const std::int32_t own = view.state.assign[i];
                // from-scratch argmin with the shared keep-current tie rule
                std::int32_t best_j = own;
                double best = view.state.own_dist[i];
                for (std::size_t j = 0; j < kk; ++j) {
                    if (static_cast<std::int32_t>(j) == own) continue;
                    const double dj =
                        std::sqrt(sq_dist(view.data.row(i), view.centroids.center(j)));
                    if (dj < best) {
                        best = dj;
                        best_j = static_cast<std::int32_t>(j);
                    }
                }

                OpCounters scratch;
                PointClassification cls;
                classify_point(i, view.data, *view.tables, view.state, view.centroids,
                               scratch, cls);
                if (cls.le) {
                    ++le_checked;
                    if (best_j != own) ++le_violations;
                }
                ++prune_checked;
                if (best_j != own && !view.tables->is_neighbor(own, best_j)) {
                    ++prune_violations;
                }
            }
        };
        run_gkmeans(data, init, params);
    }

    {
        std::ostringstream detail;
        detail << le_checked << " LE classifications, " << le_violations << " violations";
        report(6, "LE-classified points never move under the full argmin (1e3 instances)",
               le_violations == 0, detail.str(), sw6.seconds());
    }
    {
        std::ostringstream detail;
        detail << prune_checked << " argmin checks, " << prune_violations
               << " landed outside the neighbor list";
        report(7, "the argmin never falls outside the own cluster's neighbor list",
               prune_violations == 0, detail.str(), 0.0);
    }
}

// ---------------------------------------------------------------------------
// Criterion 9: byte-identical reruns.

std::string serialize_solution(const Solution& sol, const fs::path& dir, const char* tag) {
    const fs::path assign = dir / (std::string(tag) + ".assign.csv");
    const fs::path centers = dir / (std::string(tag) + ".centroids.csv");
    const fs::path telemetry = dir / (std::string(tag) + ".telemetry.csv");
    io::write_labels_csv(assign.string(), sol.assign);
    io::write_centroids_csv(centers.string(), sol.centroids);
    io::write_telemetry_csv(telemetry.string(), sol.telemetry);

    std::ostringstream all;
    for (const fs::path& p : {assign, centers, telemetry}) {
        std::ifstream in(p, std::ios::binary);
        all << in.rdbuf() << '\0';
    }
    all << sol.counters.dc_full << ',' << sol.counters.dc_le << ',' << sol.counters.dc_neighbor
        << ',' << sol.counters.proj_count;
    return std::move(all).str();
}

void criterion_determinism() {
    Stopwatch sw;
    const fs::path dir = fs::temp_directory_path() / "gkmeans_acceptance_det";
    fs::create_directories(dir);

    int mismatches = 0, cases = 0;
    for (bool overlapped : {false, true}) {
        const MixtureSpec spec = overlapped ? overlapped_preset(10, 100, 8, 5)
                                            : separated_preset(10, 100, 8, 6);
        const DataMatrix data = generate_gaussian_mixture(spec).data;
        for (const char* init_method : {"random", "kmeanspp"}) {
            OpCounters c1, c2;
            const CentroidSet init_a = std::string(init_method) == "kmeanspp"
                                           ? init_kmeanspp(data, 10, 42, c1)
                                           : init_random(data, 10, 42);
            const CentroidSet init_b = std::string(init_method) == "kmeanspp"
                                           ? init_kmeanspp(data, 10, 42, c2)
                                           : init_random(data, 10, 42);
            SolverParams params;
            for (auto run : {run_lloyd, run_gkmeans, run_hamerly}) {
                ++cases;
                const std::string a = serialize_solution(run(data, init_a, params), dir, "a");
                const std::string b = serialize_solution(run(data, init_b, params), dir, "b");
                if (a != b) ++mismatches;
            }
        }
    }
    fs::remove_all(dir);
    std::ostringstream detail;
    detail << cases << " rerun pairs, " << mismatches << " byte differences";
    report(9, "reruns are byte-identical in assignments, centroids, telemetry and DC",
           mismatches == 0, detail.str(), sw.seconds());
}

// ---------------------------------------------------------------------------
// Criterion 10: end-to-end through the CLI binary.

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_cli_end_to_end(const char* cli) {
    Stopwatch sw;
    if (cli == nullptr) {
        report(10, "CLI generate -> run -> run -> verify", false,
               "no CLI path given on the command line", 0.0);
        return;
    }
    const fs::path dir = fs::temp_directory_path() / "gkmeans_acceptance_cli";
    fs::create_directories(dir);
    const std::string quiet = " > " + (dir / "log.txt").string() + " 2>&1";
    const std::string base = std::string(cli);

    bool ok = true;
    std::string why;
    // 1e4-point separated preset
    if (shell(base + " generate --preset separated --k 20 --per-cluster 500 --d 16 --seed 7"
                     " --out " + (dir / "mix").string() + quiet) != 0) {
        ok = false;
        why = "generate failed";
    }
    if (ok && shell(base + " run --input " + (dir / "mix.csv").string() +
                    " --k 20 --algorithm gkmeans --seed 3 --out " + (dir / "gk").string() +
                    quiet) != 0) {
        ok = false;
        why = "gkmeans run failed";
    }
    if (ok && shell(base + " run --input " + (dir / "mix.csv").string() +
                    " --k 20 --algorithm lloyd --seed 3 --out " + (dir / "ll").string() +
                    quiet) != 0) {
        ok = false;
        why = "lloyd run failed";
    }
    if (ok && shell(base + " verify --input " + (dir / "mix.csv").string() +
                    " --k 20 --seed 11 --seeds 20 --out " + (dir / "verdict.json").string() +
                    quiet) != 0) {
        ok = false;
        why = "verify exited non-zero";
    }

    if (ok) {
        std::ifstream vf(dir / "verdict.json");
        const auto verdict = nlohmann::json::parse(vf, nullptr, false);
        if (verdict.is_discarded() || !verdict.value("all_passed", false)) {
            ok = false;
            why = "verdict JSON did not pass";
        } else {
            for (const auto& s : verdict["seeds"]) {
                if (s.value("ari", 0.0) != 1.0) {
                    ok = false;
                    why = "a seed reported ARI != 1";
                }
            }
        }
    }

    const double elapsed = sw.seconds();
    if (ok && elapsed > 60.0) {
        ok = false;
        why = "exceeded the 60 s budget";
    }
    fs::remove_all(dir);
    report(10, "CLI generate -> run -> run -> verify on a 1e4-point preset", ok, why, elapsed);
}

} // namespace

int main(int argc, char** argv) {
    const char* cli = argc > 1 ? argv[1] : nullptr;

    {
        Stopwatch sw;
        const SuiteTallies t = run_symmetry_suite();
        const double suite_seconds = sw.seconds();

        {
            std::ostringstream detail;
            detail << t.configs << " configs; " << t.gk_sequence_mismatches
                   << " sequence mismatches, " << t.gk_ari_not_one << " ARI != 1, "
                   << t.gk_sse_diff_not_zero << " SSE diffs != 0";
            report(1, "gkmeans == lloyd per iteration across the randomized sweep",
                   t.gk_sequence_mismatches == 0 && t.gk_ari_not_one == 0 &&
                       t.gk_sse_diff_not_zero == 0 && t.configs >= 50,
                   detail.str(), suite_seconds);
        }
        {
            std::ostringstream detail;
            detail << t.ham_sequence_mismatches << " sequence mismatches, " << t.ham_ari_not_one
                   << " ARI != 1, " << t.ham_sse_diff_not_zero << " SSE diffs != 0";
            report(2, "hamerly == lloyd on the same sweep",
                   t.ham_sequence_mismatches == 0 && t.ham_ari_not_one == 0 &&
                       t.ham_sse_diff_not_zero == 0,
                   detail.str(), 0.0);
        }
        {
            std::ostringstream detail;
            detail << t.monotonicity_violations << " violations across all solver runs";
            report(3, "SSE is non-increasing (tolerance 1e-9 relative + 1e-12)",
                   t.monotonicity_violations == 0, detail.str(), 0.0);
        }
        {
            std::ostringstream detail;
            detail << t.gk_iterations_checked << " gkmeans iterations checked, "
                   << t.telemetry_violations << " violations";
            report(8, "telemetry invariants: he <= lhe <= m-le, pdc1, pdc2, neighbor cap",
                   t.telemetry_violations == 0, detail.str(), 0.0);
        }
    }

    criterion_dc_reduction();
    criterion_he_oracle();
    criterion_le_and_pruning_safety();
    criterion_determinism();
    criterion_cli_end_to_end(cli);

    if (failures == 0) {
        std::printf("acceptance: all criteria passed\n");
    } else {
        std::printf("acceptance: %d criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
