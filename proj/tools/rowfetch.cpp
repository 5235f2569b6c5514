/*
 * Copyright 2026 The rowfetch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// rowfetch: simulate, analyze, sweep, fit and tune row prefetch sizes.
//
// Exit codes: 0 success, 2 usage error, 3 input-format error, 4 model error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rowfetch/rowfetch.hpp"

namespace {

using namespace rowfetch;

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitModel = 4;

std::optional<std::uint64_t> seed_from_env() {
    const char* raw = std::getenv("ROWFETCH_SEED");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    std::uint64_t seed = 0;
    const std::string_view text(raw);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw format_error("ROWFETCH_SEED: expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return seed;
}

RunConfig read_run_config(const std::string& path, std::optional<double> jitter) {
    auto cfg = load_config(path, seed_from_env());
    if (jitter) {
        if (!(*jitter >= 0.0 && *jitter <= 1.0)) {
            throw std::invalid_argument("--jitter must lie in [0, 1]");
        }
        cfg.jitter = *jitter;
        if (cfg.jitter > 0.0 && !cfg.seed) {
            throw format_error("run.seed: required when jitter > 0");
        }
    }
    return cfg;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw format_error("cannot write '" + path + "'");
    }
    return out;
}

/// trace.csv -> trace.trips.csv
std::string trips_path_for(const std::string& samples_path) {
    const std::string suffix = ".csv";
    if (samples_path.size() > suffix.size() &&
        samples_path.compare(samples_path.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return samples_path.substr(0, samples_path.size() - suffix.size()) + ".trips.csv";
    }
    return samples_path + ".trips.csv";
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, std::optional<double> jitter) {
    const auto cfg = read_run_config(config_path, jitter);
    const auto trace = simulate_fetch(cfg.scenario, cfg.effective_seed(), cfg.jitter);
    {
        auto out = open_output(out_path);
        write_samples_csv(out, trace);
    }
    {
        auto out = open_output(trips_path_for(out_path));
        write_trips_csv(out, trace);
    }
    const auto stages = stage_breakdown(trace);
    std::cout << "records:            " << cfg.scenario.workload.total_records << "\n"
              << "effective prefetch: " << effective_prefetch(cfg.scenario.driver) << "\n"
              << "round trips:        " << trace.trips.size() << "\n"
              << "total elapsed ms:   " << format_number(trace.total_elapsed_ms()) << "\n"
              << "execution ms:       " << format_number(stages.execution_ms) << "\n"
              << "retrieval ms:       " << format_number(stages.retrieval_ms) << "\n";
    return 0;
}

int cmd_analyze(const std::string& trace_path, const PeakPolicy& policy) {
    std::ifstream in(trace_path);
    if (!in) {
        throw format_error("cannot read trace '" + trace_path + "'");
    }
    const auto samples = read_samples_csv(in);
    const auto report = analyze_trace(samples, policy);
    std::cout << to_json(report).dump(2) << "\n";
    return 0;
}

struct SweepOptions {
    std::optional<std::string> config_path;
    std::optional<count_t> records;
    count_t first = 1;
    count_t last = 300;
    std::string mode = "sim";
    std::optional<double> jitter;
    CostConstants constants;
    bool k1_given = false;
    std::string out_path;
    std::optional<std::string> samples_path;
};

int cmd_sweep(const SweepOptions& opt) {
    if (opt.first == 0 || opt.first > opt.last) {
        throw std::invalid_argument("sweep range must satisfy 1 <= from <= to");
    }
    std::vector<double> elapsed;  // f in [first, last + 1]
    count_t records = 0;
    if (opt.mode == "sim") {
        if (!opt.config_path) {
            throw std::invalid_argument("--config is required in sim mode");
        }
        const auto cfg = read_run_config(*opt.config_path, opt.jitter);
        records = cfg.scenario.workload.total_records;
        for (count_t f = opt.first; f <= opt.last + 1; ++f) {
            const auto trace = simulate_fetch(with_prefetch(cfg.scenario, f), cfg.effective_seed(), cfg.jitter);
            elapsed.push_back(trace.total_elapsed_ms());
        }
    } else if (opt.mode == "quantized" || opt.mode == "hyperbolic") {
        if (!opt.k1_given) {
            throw std::invalid_argument("--k1 is required in model modes");
        }
        if (opt.records) {
            records = *opt.records;
        } else if (opt.config_path) {
            records = read_run_config(*opt.config_path, std::nullopt).scenario.workload.total_records;
        } else {
            throw std::invalid_argument("--records or --config is required");
        }
        opt.constants.validate();
        const auto mode = opt.mode == "hyperbolic" ? CurveMode::hyperbolic : CurveMode::quantized;
        for (const auto& p : sweep_curve(records, opt.first, opt.last + 1, opt.constants, mode)) {
            elapsed.push_back(p.elapsed_ms);
        }
    } else {
        throw std::invalid_argument("unknown mode '" + opt.mode + "'");
    }

    std::vector<SweepRow> rows;
    std::vector<FitSample> samples;
    for (std::size_t i = 0; i + 1 < elapsed.size(); ++i) {
        const count_t f = opt.first + i;
        rows.push_back({f, elapsed[i], round_trips(records, f), elapsed[i] - elapsed[i + 1]});
        samples.push_back({f, elapsed[i], records});
    }
    {
        auto out = open_output(opt.out_path);
        write_sweep_tsv(out, rows);
    }
    if (opt.samples_path) {
        auto out = open_output(*opt.samples_path);
        write_fit_samples_csv(out, records, samples);
    }
    std::cout << "wrote " << rows.size() << " rows to " << opt.out_path << "\n";
    return 0;
}

int cmd_fit(const std::string& samples_path) {
    std::ifstream in(samples_path);
    if (!in) {
        throw format_error("cannot read samples '" + samples_path + "'");
    }
    const auto samples = read_fit_samples_csv(in);
    std::cout << to_json(fit_cost_model(samples)).dump(2) << "\n";
    return 0;
}

int cmd_recommend(const std::string& config_path, count_t budget_bytes, count_t zero_run) {
    const auto cfg = read_run_config(config_path, std::nullopt);
    const auto& scenario = cfg.scenario;
    const count_t records = scenario.workload.total_records;
    if (records == 0) {
        throw model_error("nothing to tune: the workload has no records");
    }
    const MemoryBudget budget{budget_bytes, scenario.workload.record_bytes()};
    const CostSource costs = [&scenario](count_t f) { return derive_cost_constants(with_prefetch(scenario, f)); };
    const auto rec = recommend(records, budget, costs, zero_run);

    const count_t current_f = effective_prefetch(scenario.driver);
    const double current_ms = predict_elapsed(FetchPlan(records, current_f), costs(current_f));
    std::cout << to_json(rec).dump(2) << "\n\n" << format_report(rec, records, current_f, current_ms);
    return 0;
}

int cmd_slopes(count_t records, const std::vector<count_t>& sizes, double avg_trip_ms) {
    std::cout << "# f\ttrips\ttrips_next\tdecrease\tslope_ms\n";
    for (count_t f : sizes) {
        if (f == 0) {
            std::cout << "0\tunbounded\t" << round_trips(records, 1) << "\tunbounded\tunbounded\n";
            continue;
        }
        const auto row = slope_table(records, {f}, avg_trip_ms).front();
        std::cout << row.prefetch_size << '\t' << row.trips << '\t' << row.trips_next << '\t' << row.decrease << '\t'
                  << format_number(row.slope_ms) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Row prefetch performance lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::optional<double> jitter;

    auto* simulate = app.add_subcommand("simulate", "Simulate one fetch and write the trace CSVs");
    simulate->add_option("--config", config_path, "Run config file")->required();
    simulate->add_option("--out", out_path, "Samples CSV; trip log goes to <name>.trips.csv")->required();
    simulate->add_option("--jitter", jitter, "Override run.jitter");

    std::string trace_path;
    PeakPolicy policy;
    auto* analyze = app.add_subcommand("analyze", "Infer the effective prefetch size from a trace CSV");
    analyze->add_option("trace", trace_path, "Samples CSV (row_index,elapsed_ms)")->required();
    analyze->add_option("--ratio", policy.ratio, "Peak must exceed ratio x median")->capture_default_str();
    analyze->add_option("--sigma", policy.sigma_multiplier, "Noise-floor sigma multiplier")->capture_default_str();

    SweepOptions sweep_opt;
    auto* sweep = app.add_subcommand("sweep", "Elapsed time, trips and slope over a prefetch range");
    sweep->add_option("--config", sweep_opt.config_path, "Run config file");
    sweep->add_option("--records", sweep_opt.records, "Record count for model modes");
    sweep->add_option("--from", sweep_opt.first, "First prefetch size")->capture_default_str();
    sweep->add_option("--to", sweep_opt.last, "Last prefetch size")->capture_default_str();
    sweep->add_option("--mode", sweep_opt.mode, "sim, quantized or hyperbolic")
        ->check(CLI::IsMember({"sim", "quantized", "hyperbolic"}))
        ->capture_default_str();
    sweep->add_option("--jitter", sweep_opt.jitter, "Override run.jitter (sim mode)");
    auto* k1_opt = sweep->add_option("--k1", sweep_opt.constants.k1, "ms per full trip");
    sweep->add_option("--k2", sweep_opt.constants.k2, "ms per unit prefetch size");
    sweep->add_option("--k3", sweep_opt.constants.k3, "ms for the residual trip");
    sweep->add_option("--k4", sweep_opt.constants.k4, "ms per residual record");
    sweep->add_option("--out", sweep_opt.out_path, "Output TSV")->required();
    sweep->add_option("--samples", sweep_opt.samples_path, "Also write fit samples CSV");

    std::string samples_path;
    auto* fit = app.add_subcommand("fit", "Fit cost-model constants to (f, elapsed) samples");
    fit->add_option("samples", samples_path, "Samples CSV with '# N=<count>' line")->required();

    count_t budget = 0;
    count_t zero_run = kDefaultZeroRun;
    std::string rec_config;
    auto* rec = app.add_subcommand("recommend", "Threshold and optimal prefetch size under a memory budget");
    rec->add_option("--config", rec_config, "Run config file")->required();
    rec->add_option("--budget", budget, "Client memory budget in bytes")->required();
    rec->add_option("--zero-run", zero_run, "Zero-decrease run length that marks the threshold")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    count_t slope_records = 0;
    std::vector<count_t> slope_sizes;
    double avg_trip = 400.0;
    auto* slopes = app.add_subcommand("slopes", "Round-trip decrease table for given prefetch sizes");
    slopes->add_option("--records", slope_records, "Record count")->required();
    slopes->add_option("--f", slope_sizes, "Prefetch sizes (0 prints 'unbounded')")->required()->delimiter(',');
    slopes->add_option("--avg-trip-ms", avg_trip, "Average time per round trip")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate) {
            return cmd_simulate(config_path, out_path, jitter);
        }
        if (*analyze) {
            return cmd_analyze(trace_path, policy);
        }
        if (*sweep) {
            sweep_opt.k1_given = k1_opt->count() > 0;
            return cmd_sweep(sweep_opt);
        }
        if (*fit) {
            return cmd_fit(samples_path);
        }
        if (*rec) {
            return cmd_recommend(rec_config, budget, zero_run);
        }
        if (*slopes) {
            return cmd_slopes(slope_records, slope_sizes, avg_trip);
        }
    } catch (const format_error& e) {
        std::cerr << "rowfetch: input error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const model_error& e) {
        std::cerr << "rowfetch: model error: " << e.what() << "\n";
        return kExitModel;
    } catch (const std::invalid_argument& e) {
        std::cerr << "rowfetch: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
