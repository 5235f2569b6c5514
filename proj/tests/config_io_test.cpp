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
#include <sstream>

#include <gtest/gtest.h>

#include "rowfetch/config.hpp"
#include "rowfetch/io.hpp"
#include "test_support.hpp"

namespace rowfetch {
namespace {

using testing::load_preset;

constexpr const char* kMinimal = R"(# comment
workload.total_records = 20
workload.field_bytes = 10, 20
)";

TEST(Config, Minimal) {
    const auto cfg = parse_config(kMinimal);
    EXPECT_EQ(cfg.scenario.workload.total_records, 20u);
    EXPECT_EQ(cfg.scenario.workload.record_bytes(), 30u);
    EXPECT_TRUE(cfg.scenario.network.hops.empty());
    EXPECT_EQ(effective_prefetch(cfg.scenario.driver), 10u);
    EXPECT_FALSE(cfg.seed.has_value());
    EXPECT_EQ(cfg.jitter, 0.0);
}

TEST(Config, Presets) {
    const auto fig4 = load_preset("fig4.cfg");
    EXPECT_EQ(fig4.scenario.workload.total_records, 502u);
    EXPECT_EQ(fig4.scenario.driver.recommended_prefetch, 100u);
    EXPECT_EQ(effective_prefetch(fig4.scenario.driver), 10u);
    EXPECT_EQ(fig4.scenario.network.hop_count(), 4u);
    EXPECT_EQ(load_preset("fig3b.cfg").scenario.workload.total_records, 5u);
    EXPECT_EQ(load_preset("table3_near.cfg").scenario.network.hop_count(), 2u);
    EXPECT_EQ(load_preset("table3_far.cfg").scenario.network.hop_count(), 4u);
}

TEST(Config, FieldLevelErrors) {
    const auto expect_error = [](const std::string& text, const std::string& fragment) {
        try {
            (void)parse_config(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const format_error& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    expect_error("workload.field_bytes=1\n", "workload.total_records");
    expect_error("workload.total_records=-3\nworkload.field_bytes=1\n", "line 1: workload.total_records");
    expect_error(std::string(kMinimal) + "workload.total_records=3\n", "duplicate key");
    expect_error(std::string(kMinimal) + "driver.prefetch=3\n", "unknown key 'driver.prefetch'");
    expect_error(std::string(kMinimal) + "nonsense\n", "line 4: expected key=value");
    expect_error("workload.total_records=3\nworkload.field_bytes=1,0\n", "workload.field_bytes");
    expect_error(std::string(kMinimal) + "network.hop.1.base_latency_ms=4\n", "bandwidth_bytes_per_ms");
    expect_error(std::string(kMinimal) + "network.hop.1.bandwidth_bytes_per_ms=0\n", "network.hop.1");
    expect_error(std::string(kMinimal) + "network.hop.2.bandwidth_bytes_per_ms=5\n", "unknown key");
    expect_error(std::string(kMinimal) + "server.soft_parse_ms=nan\n", "server.soft_parse_ms");
    expect_error(std::string(kMinimal) + "driver.enforced_prefetch=0\n", "driver");
    expect_error(std::string(kMinimal) + "run.jitter=0.2\n", "run.seed");
    expect_error(std::string(kMinimal) + "run.jitter=2\nrun.seed=1\n", "run.jitter");
}

TEST(Config, SeedOverride) {
    const auto text = std::string(kMinimal) + "run.jitter=0.2\n";
    const auto cfg = parse_config(text, 99);
    EXPECT_EQ(cfg.seed, 99u);
    EXPECT_EQ(parse_config(std::string(kMinimal) + "run.seed=5\n", 7).seed, 7u);
}

TEST(TraceCsv, RoundTrip) {
    const auto cfg = load_preset("fig4.cfg");
    const auto trace = simulate_fetch(cfg.scenario, 3, 0.15);
    std::stringstream samples;
    std::stringstream trips;
    write_samples_csv(samples, trace);
    write_trips_csv(trips, trace);
    EXPECT_EQ(samples.str().substr(0, 21), "row_index,elapsed_ms\n");
    EXPECT_EQ(read_samples_csv(samples), trace.samples);
    EXPECT_EQ(read_trips_csv(trips), trace.trips);
}

TEST(TraceCsv, RejectsMalformedInput) {
    std::istringstream bad_header("row,elapsed\n1,0\n");
    EXPECT_THROW((void)read_samples_csv(bad_header), format_error);
    std::istringstream gap("row_index,elapsed_ms\n1,0\n3,0\n");
    EXPECT_THROW((void)read_samples_csv(gap), format_error);
    std::istringstream garbage("row_index,elapsed_ms\n1,abc\n");
    EXPECT_THROW((void)read_samples_csv(garbage), format_error);
    std::istringstream columns("row_index,elapsed_ms\n1,0,4\n");
    EXPECT_THROW((void)read_samples_csv(columns), format_error);
    std::istringstream empty_ok("row_index,elapsed_ms\n");
    EXPECT_TRUE(read_samples_csv(empty_ok).empty());
}

TEST(FitCsv, ParsesCountLineAndRows) {
    std::istringstream in("# N=502\nf,elapsed_ms\n10,20400\n50,4100.5\n");
    const auto samples = read_fit_samples_csv(in);
    ASSERT_EQ(samples.size(), 2u);
    EXPECT_EQ(samples[1].prefetch_size, 50u);
    EXPECT_EQ(samples[1].elapsed_ms, 4100.5);
    EXPECT_EQ(samples[1].total_records, 502u);

    std::istringstream missing_n("f,elapsed_ms\n10,20400\n");
    EXPECT_THROW((void)read_fit_samples_csv(missing_n), format_error);
    std::istringstream zero_f("# N=5\nf,elapsed_ms\n0,1\n");
    EXPECT_THROW((void)read_fit_samples_csv(zero_f), format_error);

    std::ostringstream out;
    write_fit_samples_csv(out, 502, samples);
    std::istringstream back(out.str());
    const auto again = read_fit_samples_csv(back);
    ASSERT_EQ(again.size(), 2u);
    EXPECT_EQ(again[0].elapsed_ms, 20400.0);
}

TEST(Tsv, SweepAndCurveLayout) {
    std::ostringstream sweep;
    write_sweep_tsv(sweep, {{10, 20400.5, 51, 1000}, {11, 19400.5, 46, 0}});
    EXPECT_EQ(sweep.str(), "# f\telapsed_ms\ttrips\tslope_ms\n10\t20400.5\t51\t1000\n11\t19400.5\t46\t0\n");
    std::ostringstream curve;
    write_curve_tsv(curve, sweep_curve(502, 1, 2, {200, 0, 0, 0, 1}, CurveMode::hyperbolic));
    EXPECT_EQ(curve.str(), "1\t100400\n2\t50200\n");
}

TEST(Json, FlatObjectsWithFieldNames) {
    PeakReport report;
    report.peak_rows = {11, 21};
    report.inferred_prefetch = 10;
    report.inter_peak_gaps = {10};
    report.avg_trip_time_ms = 400;
    report.confidence = 1.0;
    const auto j = to_json(report);
    EXPECT_EQ(j["inferred_prefetch"], 10);
    EXPECT_EQ(j["avg_trip_time"], 400.0);
    EXPECT_TRUE(to_json(PeakReport{})["inferred_prefetch"].is_null());

    FitResult fit;
    fit.residual_terms_identifiable = false;
    const auto jf = to_json(fit);
    EXPECT_TRUE(jf["k3"].is_null());
    for (const char* key : {"k1", "k2", "k3", "k4", "residual_rms", "warnings", "condition_warning"}) {
        EXPECT_TRUE(jf.contains(key)) << key;
    }

    const Recommendation rec{168, 168, 3, 1200, 100800, true, {"a"}};
    const auto jr = to_json(rec);
    for (const char* key : {"threshold_f", "optimal_f", "round_trips_at_optimal", "predicted_elapsed",
                            "memory_at_optimal", "memory_ok", "rationale"}) {
        EXPECT_TRUE(jr.contains(key)) << key;
    }
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(400.0), "400");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace rowfetch
