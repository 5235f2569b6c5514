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

// Deterministic simulation of a driver pulling a result set across a
// multi-hop network in prefetch-sized batches. Each trip is decomposed into
// request, server execution, server disk refill, transport and client-side
// field conversion; trip cost is charged to the row whose next() call blocks.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rowfetch/core_model.hpp"
#include "rowfetch/random.hpp"

namespace rowfetch {

struct HopSpec {
    double bandwidth_bytes_per_ms = 1.0;
    double base_latency_ms = 0.0;
    double availability = 1.0;  // share of bandwidth available to this transfer

    void validate() const {
        if (!(bandwidth_bytes_per_ms > 0.0)) {
            throw std::invalid_argument("hop bandwidth must be positive");
        }
        if (base_latency_ms < 0.0) {
            throw std::invalid_argument("hop base latency must be non-negative");
        }
        if (!(availability > 0.0 && availability <= 1.0)) {
            throw std::invalid_argument("hop availability must lie in (0, 1]");
        }
    }
};

/// Path between database and application server. No hops means co-located servers.
struct NetworkSpec {
    std::vector<HopSpec> hops;

    [[nodiscard]] count_t hop_count() const noexcept { return hops.size(); }

    void validate() const {
        for (const auto& hop : hops) {
            hop.validate();
        }
    }
};

struct ServerSpec {
    double hard_parse_ms = 0.0;  // first execution only
    double soft_parse_ms = 0.0;  // every trip
    double per_record_search_ms = 0.0;
    count_t cache_records = 1;   // server-side cache capacity
    double disk_access_per_refill_ms = 0.0;

    void validate() const {
        if (hard_parse_ms < 0.0 || soft_parse_ms < 0.0 || per_record_search_ms < 0.0 ||
            disk_access_per_refill_ms < 0.0) {
            throw std::invalid_argument("server times must be non-negative");
        }
        if (cache_records == 0) {
            throw std::invalid_argument("server cache size must be >= 1");
        }
    }
};

struct DriverSpec {
    count_t recommended_prefetch = 10;
    std::optional<count_t> enforced_prefetch;
    count_t default_prefetch = 10;
    double per_field_conversion_ms = 0.0;
    double request_overhead_ms = 0.0;

    void validate() const {
        if (default_prefetch == 0) {
            throw std::invalid_argument("default prefetch must be >= 1");
        }
        if (enforced_prefetch && *enforced_prefetch == 0) {
            throw std::invalid_argument("enforced prefetch must be >= 1");
        }
        if (per_field_conversion_ms < 0.0 || request_overhead_ms < 0.0) {
            throw std::invalid_argument("driver times must be non-negative");
        }
    }
};

struct Scenario {
    WorkloadSpec workload;
    NetworkSpec network;
    ServerSpec server;
    DriverSpec driver;

    void validate() const {
        workload.validate();
        network.validate();
        server.validate();
        driver.validate();
    }
};

/// The prefetch size the driver actually uses. A recommendation alone is ignored;
/// only an enforced size overrides the driver default.
[[nodiscard]] inline count_t effective_prefetch(const DriverSpec& driver) noexcept {
    return driver.enforced_prefetch.value_or(driver.default_prefetch);
}

/// Time to move `bytes` across every hop: sum of latency + bytes / (bandwidth * availability).
[[nodiscard]] inline double transport_time(count_t bytes, const NetworkSpec& net) noexcept {
    double total = 0.0;
    for (const auto& hop : net.hops) {
        total += hop.base_latency_ms +
                 static_cast<double>(bytes) / (hop.bandwidth_bytes_per_ms * hop.availability);
    }
    return total;
}

struct TripRecord {
    count_t trip_index = 0;  // 1-based
    count_t records = 0;
    double request_ms = 0.0;
    double execution_ms = 0.0;
    double disk_access_ms = 0.0;
    double transport_ms = 0.0;
    double conversion_ms = 0.0;

    [[nodiscard]] double total_ms() const noexcept {
        return request_ms + execution_ms + disk_access_ms + transport_ms + conversion_ms;
    }
    friend bool operator==(const TripRecord&, const TripRecord&) = default;
};

struct RowSample {
    count_t row_index = 0;  // 1-based
    double elapsed_ms = 0.0;
    friend bool operator==(const RowSample&, const RowSample&) = default;
};

struct LatencyTrace {
    std::vector<RowSample> samples;
    std::vector<TripRecord> trips;

    /// Time spent inside executeQuery, which performs trip 1.
    [[nodiscard]] double execution_call_ms() const noexcept {
        return trips.empty() ? 0.0 : trips.front().total_ms();
    }
    [[nodiscard]] double total_elapsed_ms() const noexcept {
        double total = 0.0;
        for (const auto& trip : trips) {
            total += trip.total_ms();
        }
        return total;
    }
    [[nodiscard]] double total_transport_ms() const noexcept {
        double total = 0.0;
        for (const auto& trip : trips) {
            total += trip.transport_ms;
        }
        return total;
    }
    friend bool operator==(const LatencyTrace&, const LatencyTrace&) = default;
};

namespace detail {

[[nodiscard]] constexpr count_t ceil_div(count_t a, count_t b) noexcept { return a / b + (a % b > 0 ? 1 : 0); }

class JitterSource {
public:
    JitterSource(std::uint64_t seed, count_t trip_index, double jitter)
        : rng_(derive_seed(seed, trip_index)), jitter_(jitter) {}

    double apply(double value) {
        if (jitter_ == 0.0) {
            return value;
        }
        const double u = rng_.unit();
        return value * (1.0 + jitter_ * (2.0 * u - 1.0));
    }

private:
    SplitMix64 rng_;
    double jitter_;
};

}  // namespace detail

/// Runs one fetch of the whole result set. With jitter = 0 the trace does not
/// depend on the seed; otherwise every component of every trip is scaled by an
/// independent uniform factor in [1 - jitter, 1 + jitter].
[[nodiscard]] inline LatencyTrace simulate_fetch(const Scenario& scenario, std::uint64_t seed, double jitter = 0.0) {
    scenario.validate();
    if (!(jitter >= 0.0 && jitter <= 1.0)) {
        throw std::invalid_argument("jitter must lie in [0, 1]");
    }

    const auto& workload = scenario.workload;
    const auto& server = scenario.server;
    const auto& driver = scenario.driver;
    const count_t n = workload.total_records;
    const count_t f = effective_prefetch(driver);
    const count_t record_bytes = workload.record_bytes();
    const double fields = static_cast<double>(workload.field_count());

    LatencyTrace trace;
    trace.samples.reserve(n);
    trace.trips.reserve(round_trips(n, f));

    count_t delivered = 0;
    for (count_t trip = 1; delivered < n; ++trip) {
        const count_t records = std::min(f, n - delivered);
        const count_t refills = detail::ceil_div(delivered + records, server.cache_records) -
                                detail::ceil_div(delivered, server.cache_records);

        double execution = server.soft_parse_ms + server.per_record_search_ms * static_cast<double>(records);
        if (trip == 1) {
            execution += server.hard_parse_ms;
        }

        detail::JitterSource jitter_source(seed, trip, jitter);
        TripRecord rec;
        rec.trip_index = trip;
        rec.records = records;
        rec.request_ms = jitter_source.apply(driver.request_overhead_ms);
        rec.execution_ms = jitter_source.apply(execution);
        rec.disk_access_ms = jitter_source.apply(server.disk_access_per_refill_ms * static_cast<double>(refills));
        rec.transport_ms = jitter_source.apply(transport_time(records * record_bytes, scenario.network));
        rec.conversion_ms =
            jitter_source.apply(driver.per_field_conversion_ms * fields * static_cast<double>(records));
        trace.trips.push_back(rec);

        for (count_t i = 0; i < records; ++i) {
            const bool blocks = trip > 1 && i == 0;
            trace.samples.push_back({delivered + i + 1, blocks ? rec.total_ms() : 0.0});
        }
        delivered += records;
    }
    return trace;
}

struct StageBreakdown {
    double execution_ms = 0.0;  // executeQuery: request + server execution of trip 1
    double retrieval_ms = 0.0;  // everything else, including the rest of trip 1
};

[[nodiscard]] inline StageBreakdown stage_breakdown(const LatencyTrace& trace) noexcept {
    if (trace.trips.empty()) {
        return {};
    }
    const auto& first = trace.trips.front();
    StageBreakdown out;
    out.execution_ms = first.request_ms + first.execution_ms;
    out.retrieval_ms = trace.total_elapsed_ms() - out.execution_ms;
    return out;
}

/// Cost-model constants that reproduce the jitter-free simulator total at the
/// scenario's effective prefetch size. k2 is folded into k1 (per-trip transport
/// already scales with f), and one-off costs (hard parse, server refills) are
/// spread evenly over all trips. avg_trip_time is set to k1.
[[nodiscard]] inline CostConstants derive_cost_constants(const Scenario& scenario) {
    scenario.validate();
    const auto& server = scenario.server;
    const auto& driver = scenario.driver;
    const count_t n = scenario.workload.total_records;
    const count_t f = effective_prefetch(driver);
    const double rb = static_cast<double>(scenario.workload.record_bytes());
    const double fields = static_cast<double>(scenario.workload.field_count());
    const double fd = static_cast<double>(f);

    double base_latency = 0.0;
    double ms_per_byte = 0.0;
    for (const auto& hop : scenario.network.hops) {
        base_latency += hop.base_latency_ms;
        ms_per_byte += 1.0 / (hop.bandwidth_bytes_per_ms * hop.availability);
    }

    const double per_trip_fixed = driver.request_overhead_ms + server.soft_parse_ms + base_latency;
    const double per_record = server.per_record_search_ms + rb * ms_per_byte + fields * driver.per_field_conversion_ms;

    const count_t trips = round_trips(n, f);
    double one_off_share = 0.0;
    if (trips > 0) {
        const double one_off = server.hard_parse_ms + server.disk_access_per_refill_ms *
                                                          static_cast<double>(detail::ceil_div(n, server.cache_records));
        one_off_share = one_off / static_cast<double>(trips);
    }

    CostConstants k;
    k.k1 = per_trip_fixed + per_record * fd + one_off_share;
    k.k2 = 0.0;
    k.k3 = per_trip_fixed + one_off_share;
    k.k4 = per_record;
    k.avg_trip_time = k.k1 > 0.0 ? k.k1 : 1.0;
    return k;
}

/// Same scenario with the driver forced to use prefetch size `f`.
[[nodiscard]] inline Scenario with_prefetch(Scenario scenario, count_t f) {
    scenario.driver.enforced_prefetch = f;
    return scenario;
}

}  // namespace rowfetch
