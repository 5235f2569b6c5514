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
#pragma once

// Shared helpers for the test binaries: preset loading and a seeded
// generator of valid random scenarios.

#include <string>

#include "rowfetch/config.hpp"
#include "rowfetch/fetch_sim.hpp"
#include "rowfetch/random.hpp"

namespace rowfetch::testing {

inline RunConfig load_preset(const std::string& name) {
    return load_config(std::string(ROWFETCH_PRESET_DIR) + "/" + name);
}

class ScenarioGenerator {
public:
    explicit ScenarioGenerator(std::uint64_t seed) : rng_(seed) {}

    count_t integer(count_t lo, count_t hi) { return lo + rng_.next() % (hi - lo + 1); }
    double real(double lo, double hi) { return lo + (hi - lo) * rng_.unit(); }

    Scenario next() {
        Scenario s;
        s.workload.total_records = integer(0, 1500);
        const auto fields = integer(1, 12);
        for (count_t i = 0; i < fields; ++i) {
            s.workload.field_byte_sizes.push_back(integer(1, 400));
        }
        const auto hops = integer(0, 5);
        for (count_t i = 0; i < hops; ++i) {
            s.network.hops.push_back({real(10.0, 5000.0), real(0.0, 80.0), real(0.2, 1.0)});
        }
        s.server.hard_parse_ms = real(0.0, 900.0);
        s.server.soft_parse_ms = real(0.0, 10.0);
        s.server.per_record_search_ms = real(0.0, 0.5);
        s.server.cache_records = integer(1, 400);
        s.server.disk_access_per_refill_ms = real(0.0, 50.0);
        s.driver.default_prefetch = integer(1, 60);
        if (rng_.unit() < 0.5) {
            s.driver.enforced_prefetch = integer(1, 300);
        }
        s.driver.recommended_prefetch = integer(1, 500);
        s.driver.per_field_conversion_ms = real(0.0, 0.05);
        s.driver.request_overhead_ms = real(0.0, 20.0);
        return s;
    }

private:
    SplitMix64 rng_;
};

}  // namespace rowfetch::testing
