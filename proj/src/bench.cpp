#include "gkmeans/bench.hpp"
#include "gkmeans/energy.hpp"
#include "gkmeans/errors.hpp"
#include "gkmeans/io.hpp"
#include "gkmeans/metrics.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

namespace gkmeans {

using nlohmann::json;

namespace {

MixtureSpec preset_from_json(const json& j) {
    MixtureSpec spec;
    const std::string name = j.value("preset", "separated");
    const std::size_t k = j.value("k", 4);
    const std::size_t per_cluster = j.value("per_cluster", 250);
    const std::size_t d = j.value("d", 2);
    const std::uint64_t seed = j.value("seed", 0);
    if (name == "separated") {
        spec = separated_preset(k, per_cluster, d, seed);
    } else if (name == "overlapped") {
        spec = overlapped_preset(k, per_cluster, d, seed);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    if (j.contains("mean_separation")) spec.mean_separation = j.at("mean_separation");
    if (j.contains("cov_low")) spec.cov_low = j.at("cov_low");
    if (j.contains("cov_high")) spec.cov_high = j.at("cov_high");
    return spec;
}

Solution run_algorithm(const std::string& name, const DataMatrix& data,
                       const CentroidSet& init, const SolverParams& params) {
    if (name == "lloyd") return run_lloyd(data, init, params);
    if (name == "gkmeans") return run_gkmeans(data, init, params);
    if (name == "hamerly") return run_hamerly(data, init, params);
    throw ConfigError("unknown algorithm '" + name + "'");
}

struct TrialResult {
    double dc = 0.0;
    double rt_ms = 0.0;
    double iters = 0.0;
    double sse = 0.0;
    double energy_cpu = 0.0;
    double energy_mem = 0.0;
};

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return out;
}

json config_to_json(const BenchConfig& c) {
    json datasets = json::array();
    for (const DatasetSpec& ds : c.datasets) {
        json d;
        d["name"] = ds.name;
        if (!ds.path.empty()) {
            d["path"] = ds.path;
            d["label_column"] = ds.label_column;
        }
        if (ds.preset) {
            d["k"] = ds.preset->k;
            d["per_cluster"] = ds.preset->per_cluster;
            d["d"] = ds.preset->d;
            d["mean_separation"] = ds.preset->mean_separation;
            d["cov_low"] = ds.preset->cov_low;
            d["cov_high"] = ds.preset->cov_high;
            d["seed"] = ds.preset->seed;
        }
        datasets.push_back(d);
    }
    return json{{"datasets", datasets}, {"algorithms", c.algorithms},
                {"k", c.k_values},      {"trials", c.trials},
                {"init", c.init},       {"max_iters", c.max_iters},
                {"epsilon", c.epsilon}, {"seed_base", c.seed_base},
                {"energy", c.energy}};
}

} // namespace

BenchConfig parse_bench_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config JSON: ") + e.what());
    }

    BenchConfig c;
    try {
        if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty()) {
            throw ConfigError("config needs a non-empty 'datasets' array");
        }
        for (const json& d : j["datasets"]) {
            DatasetSpec spec;
            if (d.contains("path")) {
                spec.path = d.at("path").get<std::string>();
                spec.label_column = d.value("label_column", false);
                spec.name = d.value("name", std::filesystem::path(spec.path).stem().string());
            } else {
                spec.preset = preset_from_json(d);
                spec.name = d.value("name", d.value("preset", "separated"));
            }
            c.datasets.push_back(std::move(spec));
        }

        c.algorithms = j.value("algorithms", std::vector<std::string>{"lloyd", "gkmeans"});
        if (c.algorithms.empty()) throw ConfigError("'algorithms' must be non-empty");
        for (const std::string& a : c.algorithms) {
            if (a != "lloyd" && a != "gkmeans" && a != "hamerly") {
                throw ConfigError("unknown algorithm '" + a + "'");
            }
        }

        c.k_values = j.value("k", std::vector<std::size_t>{});
        if (c.k_values.empty()) throw ConfigError("config needs a non-empty 'k' list");

        c.trials = j.value("trials", 10);
        if (c.trials < 1) throw ConfigError("'trials' must be >= 1");

        c.init = j.value("init", "random");
        if (c.init != "random" && c.init != "kmeanspp") {
            throw ConfigError("'init' must be random or kmeanspp");
        }

        c.max_iters = j.value("max_iters", 500);
        c.epsilon = j.value("epsilon", 0.0);
        if (!j.contains("seed_base")) {
            throw ConfigError("config needs 'seed_base' (reproducibility is mandatory here)");
        }
        c.seed_base = j.at("seed_base").get<std::uint64_t>();
        c.energy = j.value("energy", false);
        c.telemetry_dir = j.value("telemetry_dir", "");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    }
    return c;
}

BenchConfig load_bench_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_bench_config(text);
}

BenchReport run_benchmark(const BenchConfig& config) {
    BenchReport report;
    report.config_echo_json = config_to_json(config).dump();

    EnergyMeter meter;
    const bool use_energy = config.energy && meter.supported();
    if (config.energy && !meter.supported()) {
        report.energy_note = meter.unsupported_reason();
    }

    if (!config.telemetry_dir.empty()) {
        std::filesystem::create_directories(config.telemetry_dir);
    }

    for (const DatasetSpec& ds : config.datasets) {
        DataMatrix data;
        std::string load_error;
        try {
            if (!ds.path.empty()) {
                data = io::read_matrix_csv(ds.path, ds.label_column).data;
                data.validate_finite();
            } else {
                data = generate_gaussian_mixture(*ds.preset).data;
            }
        } catch (const std::exception& e) {
            load_error = e.what();
        }

        for (std::size_t k : config.k_values) {
            std::string cell_error = load_error;
            if (cell_error.empty() && k > data.rows()) {
                cell_error = "k exceeds point count";
            }
            if (!cell_error.empty()) {
                for (const std::string& alg : config.algorithms) {
                    BenchCell cell;
                    cell.dataset = ds.name;
                    cell.algorithm = alg;
                    cell.k = k;
                    cell.failures = config.trials;
                    cell.error = cell_error;
                    report.cells.push_back(std::move(cell));
                }
                continue;
            }

            std::map<std::string, std::vector<TrialResult>> results;
            std::map<std::string, int> failures;
            std::map<std::string, std::vector<std::string>> telemetry_files;
            for (const std::string& alg : config.algorithms) {
                results[alg];
                failures[alg] = 0;
            }

            for (int trial = 0; trial < config.trials; ++trial) {
                const std::uint64_t seed = config.seed_base + static_cast<std::uint64_t>(trial);
                OpCounters init_counters; // init work is shared, charged to no algorithm
                const CentroidSet init =
                    config.init == "kmeanspp" ? init_kmeanspp(data, k, seed, init_counters)
                                              : init_random(data, k, seed);

                for (const std::string& alg : config.algorithms) {
                    SolverParams params;
                    params.max_iters = config.max_iters;
                    params.epsilon = config.epsilon;
                    params.seed = seed;
                    try {
                        EnergyMeter::Snapshot before;
                        if (use_energy) before = meter.snapshot();
                        const auto t0 = std::chrono::steady_clock::now();
                        const Solution sol = run_algorithm(alg, data, init, params);
                        const auto t1 = std::chrono::steady_clock::now();

                        TrialResult r;
                        r.dc = static_cast<double>(sol.counters.dc_full);
                        r.rt_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                        r.iters = sol.iterations;
                        r.sse = sol.sse;
                        if (use_energy) {
                            const EnergySample e = meter.delta(before, meter.snapshot());
                            r.energy_cpu = e.package_j;
                            r.energy_mem = e.dram_j;
                        }
                        results[alg].push_back(r);

                        if (!config.telemetry_dir.empty()) {
                            const std::string file =
                                config.telemetry_dir + "/" + sanitize(ds.name) + "_" + alg +
                                "_k" + std::to_string(k) + "_trial" + std::to_string(trial) +
                                ".csv";
                            io::write_telemetry_csv(file, sol.telemetry);
                            telemetry_files[alg].push_back(file);
                        }
                    } catch (const std::exception&) {
                        failures[alg] += 1;
                    }
                }
            }

            // lloyd baseline of this (dataset, k) group, when present
            std::optional<double> lloyd_dc, lloyd_rt;
            if (results.count("lloyd") && !results["lloyd"].empty()) {
                std::vector<double> dcs, rts;
                for (const TrialResult& r : results["lloyd"]) {
                    dcs.push_back(r.dc);
                    rts.push_back(r.rt_ms);
                }
                lloyd_dc = mean_of(dcs);
                lloyd_rt = mean_of(rts);
            }

            for (const std::string& alg : config.algorithms) {
                const auto& rs = results[alg];
                BenchCell cell;
                cell.dataset = ds.name;
                cell.algorithm = alg;
                cell.k = k;
                cell.n_trials = static_cast<int>(rs.size());
                cell.failures = failures[alg];
                cell.telemetry_files = telemetry_files[alg];

                std::vector<double> dcs, rts, its, sses, ecpu, emem;
                for (const TrialResult& r : rs) {
                    dcs.push_back(r.dc);
                    rts.push_back(r.rt_ms);
                    its.push_back(r.iters);
                    sses.push_back(r.sse);
                    ecpu.push_back(r.energy_cpu);
                    emem.push_back(r.energy_mem);
                }
                cell.dc_mean = mean_of(dcs);
                cell.dc_sd = sd_of(dcs);
                cell.rt_ms_mean = mean_of(rts);
                cell.rt_ms_sd = sd_of(rts);
                cell.iters_mean = mean_of(its);
                cell.sse_mean = mean_of(sses);
                if (use_energy && !rs.empty()) {
                    cell.energy_cpu_j = mean_of(ecpu);
                    cell.energy_mem_j = mean_of(emem);
                }
                if (lloyd_dc && !rs.empty()) {
                    if (*lloyd_dc > 0.0) {
                        cell.dc_savings_pct = (*lloyd_dc - cell.dc_mean) / *lloyd_dc * 100.0;
                    }
                    if (*lloyd_rt > 0.0) {
                        cell.rt_speedup_pct = (*lloyd_rt - cell.rt_ms_mean) / *lloyd_rt * 100.0;
                    }
                }
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

std::string report_to_json_string(const BenchReport& report) {
    json j;
    j["config"] = json::parse(report.config_echo_json);
    if (!report.energy_note.empty()) j["energy_note"] = report.energy_note;
    json cells = json::array();
    for (const BenchCell& c : report.cells) {
        json jc;
        jc["dataset"] = c.dataset;
        jc["algorithm"] = c.algorithm;
        jc["k"] = c.k;
        jc["n_trials"] = c.n_trials;
        jc["failures"] = c.failures;
        if (!c.error.empty()) {
            jc["error"] = c.error;
        } else {
            jc["dc_mean"] = c.dc_mean;
            jc["dc_sd"] = c.dc_sd;
            jc["rt_ms_mean"] = c.rt_ms_mean;
            jc["rt_ms_sd"] = c.rt_ms_sd;
            jc["iters_mean"] = c.iters_mean;
            jc["sse_mean"] = c.sse_mean;
            if (c.dc_savings_pct) jc["dc_savings_pct"] = *c.dc_savings_pct;
            if (c.rt_speedup_pct) jc["rt_speedup_pct"] = *c.rt_speedup_pct;
            if (c.energy_cpu_j) jc["energy_cpu_j"] = *c.energy_cpu_j;
            if (c.energy_mem_j) jc["energy_mem_j"] = *c.energy_mem_j;
            if (!c.telemetry_files.empty()) jc["telemetry_files"] = c.telemetry_files;
        }
        cells.push_back(jc);
    }
    j["cells"] = cells;
    return j.dump(2);
}

void write_report_json(const BenchReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << report_to_json_string(report) << '\n';
}

void write_report_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "dataset,algorithm,k,n_trials,failures,dc_mean,dc_sd,rt_ms_mean,rt_ms_sd,"
           "iters_mean,sse_mean,dc_savings_pct,rt_speedup_pct,energy_cpu_j,energy_mem_j,"
           "energy_total_j,error\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? io::format_double(*v) : std::string();
    };
    for (const BenchCell& c : report.cells) {
        std::optional<double> total;
        if (c.energy_cpu_j || c.energy_mem_j) {
            total = c.energy_cpu_j.value_or(0.0) + c.energy_mem_j.value_or(0.0);
        }
        out << c.dataset << ',' << c.algorithm << ',' << c.k << ',' << c.n_trials << ','
            << c.failures << ',' << io::format_double(c.dc_mean) << ','
            << io::format_double(c.dc_sd) << ',' << io::format_double(c.rt_ms_mean) << ','
            << io::format_double(c.rt_ms_sd) << ',' << io::format_double(c.iters_mean) << ','
            << io::format_double(c.sse_mean) << ',' << opt(c.dc_savings_pct) << ','
            << opt(c.rt_speedup_pct) << ',' << opt(c.energy_cpu_j) << ','
            << opt(c.energy_mem_j) << ',' << opt(total) << ',' << c.error << '\n';
    }
}

bool SeedVerdict::passed() const {
    bool ok = gk_sequence_identical && gk_ari == 1.0 && gk_sse_diff == 0.0;
    if (hamerly_checked) {
        ok = ok && hamerly_sequence_identical && hamerly_ari == 1.0 && hamerly_sse_diff == 0.0;
    }
    return ok;
}

bool SymmetryVerdict::all_passed() const {
    for (const SeedVerdict& s : seeds)
        if (!s.passed()) return false;
    return !seeds.empty();
}

SymmetryVerdict verify_symmetry(const DataMatrix& data, std::size_t k,
                                std::span<const std::uint64_t> seeds,
                                const std::string& init_method, bool include_hamerly,
                                const SolverParams& base_params) {
    if (k < 2) throw ConfigError("verify needs k >= 2");
    if (init_method != "random" && init_method != "kmeanspp") {
        throw ConfigError("init must be random or kmeanspp");
    }

    SymmetryVerdict verdict;
    for (std::uint64_t seed : seeds) {
        OpCounters init_counters;
        const CentroidSet init = init_method == "kmeanspp"
                                     ? init_kmeanspp(data, k, seed, init_counters)
                                     : init_random(data, k, seed);

        std::vector<std::vector<std::int32_t>> reference;
        SolverParams lp = base_params;
        lp.prefer_new_on_tie = false;
        lp.on_assignments = [&reference](int, std::span<const std::int32_t> a) {
            reference.emplace_back(a.begin(), a.end());
        };
        const Solution lloyd = run_lloyd(data, init, lp);

        SeedVerdict sv;
        sv.seed = seed;

        auto compare_against_reference = [&reference](const SolverParams& base,
                                                      int& first_divergent) {
            SolverParams p = base;
            p.on_assignments = [&reference, &first_divergent](
                                   int iter, std::span<const std::int32_t> a) {
                if (first_divergent != -1) return;
                const std::size_t idx = static_cast<std::size_t>(iter - 1);
                if (idx >= reference.size() ||
                    !std::equal(a.begin(), a.end(), reference[idx].begin(),
                                reference[idx].end())) {
                    first_divergent = iter;
                }
            };
            return p;
        };

        {
            SolverParams gp = compare_against_reference(base_params, sv.gk_first_divergent_iter);
            const Solution gk = run_gkmeans(data, init, gp);
            if (sv.gk_first_divergent_iter == -1 &&
                gk.iterations != static_cast<int>(reference.size())) {
                sv.gk_first_divergent_iter =
                    std::min<int>(gk.iterations, static_cast<int>(reference.size())) + 1;
            }
            sv.gk_sequence_identical = sv.gk_first_divergent_iter == -1;
            sv.gk_ari = ari(lloyd.assign, gk.assign);
            sv.gk_sse_diff = gk.sse - lloyd.sse;
        }

        if (include_hamerly) {
            sv.hamerly_checked = true;
            SolverParams hb = base_params;
            hb.prefer_new_on_tie = false;
            SolverParams hp = compare_against_reference(hb, sv.hamerly_first_divergent_iter);
            const Solution ham = run_hamerly(data, init, hp);
            if (sv.hamerly_first_divergent_iter == -1 &&
                ham.iterations != static_cast<int>(reference.size())) {
                sv.hamerly_first_divergent_iter =
                    std::min<int>(ham.iterations, static_cast<int>(reference.size())) + 1;
            }
            sv.hamerly_sequence_identical = sv.hamerly_first_divergent_iter == -1;
            sv.hamerly_ari = ari(lloyd.assign, ham.assign);
            sv.hamerly_sse_diff = ham.sse - lloyd.sse;
        }

        verdict.seeds.push_back(sv);
    }
    return verdict;
}

std::string verdict_to_json_string(const SymmetryVerdict& verdict) {
    json seeds = json::array();
    for (const SeedVerdict& s : verdict.seeds) {
        json js;
        js["seed"] = s.seed;
        js["passed"] = s.passed();
        js["assignments_identical"] = s.gk_sequence_identical;
        if (s.gk_first_divergent_iter != -1) {
            js["first_divergent_iteration"] = s.gk_first_divergent_iter;
        }
        js["ari"] = s.gk_ari;
        js["sse_diff"] = s.gk_sse_diff;
        if (s.hamerly_checked) {
            js["hamerly_assignments_identical"] = s.hamerly_sequence_identical;
            if (s.hamerly_first_divergent_iter != -1) {
                js["hamerly_first_divergent_iteration"] = s.hamerly_first_divergent_iter;
            }
            js["hamerly_ari"] = s.hamerly_ari;
            js["hamerly_sse_diff"] = s.hamerly_sse_diff;
        }
        seeds.push_back(js);
    }
    json j;
    j["all_passed"] = verdict.all_passed();
    j["seeds"] = seeds;
    return j.dump(2);
}

} // namespace gkmeans
