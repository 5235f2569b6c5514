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
#include "rowfetch/tuner.hpp"

#include <stdexcept>

#include <gtest/gtest.h>

namespace rowfetch {
namespace {

// Direct scan: first f whose next `run` sizes all keep the same trip count.
count_t scan_threshold(count_t n, count_t run) {
    for (count_t f = 1;; ++f) {
        bool flat = true;
        for (count_t g = f; g < f + run && flat; ++g) {
            flat = (n + g - 1) / g == (n + g) / (g + 1);
        }
        if (flat) {
            return std::min(f, n);
        }
    }
}

CostSource flat_costs(double per_trip) {
    return [per_trip](count_t) { return CostConstants{per_trip, 0, per_trip, 0, per_trip}; };
}

TEST(Threshold, DefaultRunLandsOnThreeTripPlateau) {
    EXPECT_EQ(threshold_prefetch(502), 168u);
    EXPECT_EQ(round_trips(502, threshold_prefetch(502)), 3u);
}

TEST(Threshold, RunLengthSelectsPlateau) {
    EXPECT_EQ(threshold_prefetch(502, 1), 24u);
    EXPECT_EQ(threshold_prefetch(502, 25), 126u);
    EXPECT_EQ(threshold_prefetch(502, 41), 126u);
    EXPECT_EQ(threshold_prefetch(502, 42), 168u);
    EXPECT_EQ(threshold_prefetch(502, 82), 168u);
    EXPECT_EQ(threshold_prefetch(502, 83), 251u);
}

TEST(Threshold, SmallCases) {
    EXPECT_EQ(threshold_prefetch(10, 1), 5u);
    EXPECT_EQ(threshold_prefetch(1, 1), 1u);
    EXPECT_EQ(threshold_prefetch(1), 1u);
    EXPECT_THROW((void)threshold_prefetch(0, 1), std::invalid_argument);
    EXPECT_THROW((void)threshold_prefetch(10, 0), std::invalid_argument);
}

TEST(Threshold, MatchesDirectScan) {
    for (count_t n = 1; n <= 700; ++n) {
        for (count_t run : {1u, 3u, 25u, 50u}) {
            const auto t = threshold_prefetch(n, run);
            ASSERT_EQ(t, scan_threshold(n, run)) << "n=" << n << " run=" << run;
            ASSERT_LE(t, n);
        }
    }
}

TEST(Threshold, CustomDecreaseSource) {
    // A measured slope that is flat from f = 40 on.
    const auto t = threshold_prefetch(502, 10, [](count_t f) { return f < 40 ? count_t{3} : count_t{0}; });
    EXPECT_EQ(t, 40u);
    EXPECT_EQ(threshold_prefetch(502, 10, [](count_t) { return count_t{1}; }), 502u);
}

TEST(Optimal, ReducesToSmallestSizeWithSameTrips) {
    EXPECT_EQ(optimal_prefetch(502, 226), 168u);
    EXPECT_EQ(optimal_prefetch(502, 251), 251u);
    EXPECT_EQ(round_trips(502, 251), 2u);
    EXPECT_EQ(optimal_prefetch(502, 502), 502u);
    EXPECT_EQ(optimal_prefetch(1, 1), 1u);
    EXPECT_THROW((void)optimal_prefetch(10, 0), std::invalid_argument);
    EXPECT_THROW((void)optimal_prefetch(10, 11), std::invalid_argument);
}

TEST(Optimal, PreservesTripsAndIsMinimal) {
    for (count_t n = 1; n <= 600; ++n) {
        for (count_t t = 1; t <= n; ++t) {
            const auto opt = optimal_prefetch(n, t);
            const auto trips = round_trips(n, t);
            ASSERT_LE(opt, t);
            ASSERT_EQ(round_trips(n, opt), trips);
            if (opt > 1) {
                ASSERT_GT(round_trips(n, opt - 1), trips);
            }
            ASSERT_EQ(optimal_prefetch(n, opt), opt);
        }
    }
}

TEST(Memory, Checks) {
    const MemoryBudget budget{1'000'000, 4000};
    auto c = check_memory(168, budget);
    EXPECT_TRUE(c.ok);
    EXPECT_EQ(c.bytes, 672'000u);
    EXPECT_EQ(c.max_feasible_f, 250u);

    c = check_memory(500, budget);
    EXPECT_FALSE(c.ok);
    EXPECT_EQ(c.bytes, 2'000'000u);

    EXPECT_TRUE(check_memory(1, {4000, 4000}).ok);
    EXPECT_THROW((void)check_memory(1, {3999, 4000}), std::invalid_argument);
    EXPECT_THROW((void)check_memory(1, {100, 0}), std::invalid_argument);

    count_t prev = 0;
    for (count_t f = 1; f <= 300; ++f) {
        const auto m = check_memory(f, budget);
        ASSERT_GT(m.bytes, prev);
        ASSERT_EQ(m.ok, f <= m.max_feasible_f);
        prev = m.bytes;
    }
}

TEST(Recommend, CaseStudyPipeline) {
    const auto rec = recommend(502, {1'000'000'000, 600}, flat_costs(400));
    EXPECT_EQ(rec.threshold_f, 168u);
    EXPECT_EQ(rec.optimal_f, 168u);
    EXPECT_EQ(rec.round_trips_at_optimal, 3u);
    EXPECT_TRUE(rec.memory_ok);
    EXPECT_EQ(rec.memory_at_optimal, 168u * 600u);
    EXPECT_DOUBLE_EQ(rec.predicted_elapsed, 1200.0);
    EXPECT_EQ(rec.rationale.size(), 3u);
}

TEST(Recommend, MemoryClamp) {
    const auto rec = recommend(502, {100 * 600, 600}, flat_costs(400));
    EXPECT_EQ(rec.optimal_f, 100u);
    EXPECT_EQ(rec.round_trips_at_optimal, 6u);
    EXPECT_FALSE(rec.memory_ok);
    EXPECT_DOUBLE_EQ(rec.predicted_elapsed, 2400.0);
    EXPECT_NE(rec.rationale.back().find("memory clamp"), std::string::npos);
    EXPECT_LE(rec.memory_at_optimal, 100u * 600u);
}

TEST(Recommend, SingleRecord) {
    const auto rec = recommend(1, {600, 600}, flat_costs(400));
    EXPECT_EQ(rec.optimal_f, 1u);
    EXPECT_EQ(rec.round_trips_at_optimal, 1u);
}

TEST(Recommend, InvariantsAcrossSizes) {
    for (count_t n = 1; n <= 400; ++n) {
        const auto rec = recommend(n, {1u << 30, 100}, flat_costs(1));
        ASSERT_LE(rec.optimal_f, rec.threshold_f);
        ASSERT_EQ(round_trips(n, rec.optimal_f), round_trips(n, rec.threshold_f));
        ASSERT_EQ(optimal_prefetch(n, rec.optimal_f), rec.optimal_f);
    }
}

TEST(Recommend, ReportMentionsChange) {
    const auto rec = recommend(502, {1'000'000'000, 600}, flat_costs(400));
    const auto text = format_report(rec, 502, 10, 20400);
    EXPECT_NE(text.find("Bottleneck:"), std::string::npos);
    EXPECT_NE(text.find("51 round trips"), std::string::npos);
    EXPECT_NE(text.find("prefetch size 168"), std::string::npos);
    EXPECT_NE(text.find("Tradeoff:"), std::string::npos);
    EXPECT_NE(text.find("20400.0 ms -> 1200.0 ms"), std::string::npos);
}

}  // namespace
}  // namespace rowfetch
