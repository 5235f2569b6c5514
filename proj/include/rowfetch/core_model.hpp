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

// Closed-form arithmetic of the row-prefetch cost model: round-trip counts,
// the quantized and hyperbolic elapsed-time forms, and discrete slope tables.
// Times are milliseconds (double); counts are unsigned.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rowfetch {

using count_t = std::uint64_t;

/// The result set being fetched: N records, each laid out as a list of field widths.
struct WorkloadSpec {
    count_t total_records = 0;
    std::vector<count_t> field_byte_sizes;

    [[nodiscard]] count_t record_bytes() const noexcept {
        return std::accumulate(field_byte_sizes.begin(), field_byte_sizes.end(), count_t{0});
    }
    [[nodiscard]] count_t field_count() const noexcept { return field_byte_sizes.size(); }

    void validate() const {
        if (field_byte_sizes.empty()) {
            throw std::invalid_argument("workload: at least one field is required");
        }
        for (auto size : field_byte_sizes) {
            if (size == 0) {
                throw std::invalid_argument("workload: field byte sizes must be >= 1");
            }
        }
    }
};

/// Number of trips needed to move `records` rows `prefetch` at a time.
[[nodiscard]] inline count_t round_trips(count_t records, count_t prefetch) {
    if (prefetch == 0) {
        throw std::invalid_argument("prefetch size must be >= 1");
    }
    return records / prefetch + (records % prefetch > 0 ? 1 : 0);
}

/// A (records, prefetch size) pair; prefetch 0 is unrepresentable.
class FetchPlan {
public:
    FetchPlan(count_t total_records, count_t prefetch_size)
        : total_records_(total_records), prefetch_size_(prefetch_size) {
        if (prefetch_size_ == 0) {
            throw std::invalid_argument("prefetch size must be >= 1");
        }
    }

    [[nodiscard]] count_t total_records() const noexcept { return total_records_; }
    [[nodiscard]] count_t prefetch_size() const noexcept { return prefetch_size_; }
    [[nodiscard]] count_t full_trips() const noexcept { return total_records_ / prefetch_size_; }
    [[nodiscard]] count_t residual_records() const noexcept { return total_records_ % prefetch_size_; }
    [[nodiscard]] bool has_residual_trip() const noexcept { return residual_records() > 0; }
    [[nodiscard]] count_t trips() const noexcept { return full_trips() + (has_residual_trip() ? 1 : 0); }

private:
    count_t total_records_;
    count_t prefetch_size_;
};

/// Coefficients of the quantized cost model
///   T = k1 * full_trips + k2 * f + [residual] * (k3 + k4 * residual_records).
/// avg_trip_time is only used for slope-table illustration.
struct CostConstants {
    double k1 = 0.0;  // ms per full trip
    double k2 = 0.0;  // ms per unit of prefetch size
    double k3 = 0.0;  // ms for the residual trip
    double k4 = 0.0;  // ms per residual record
    double avg_trip_time = 1.0;

    void validate() const {
        if (k1 < 0.0 || k2 < 0.0 || k3 < 0.0 || k4 < 0.0) {
            throw std::invalid_argument("cost constants must be non-negative");
        }
        if (!(avg_trip_time > 0.0)) {
            throw std::invalid_argument("average trip time must be positive");
        }
    }

    friend bool operator==(const CostConstants&, const CostConstants&) = default;
};

struct CurvePoint {
    count_t prefetch_size = 0;
    double elapsed_ms = 0.0;
};

enum class CurveMode {
    quantized,   // trip-quantized form with residual terms
    hyperbolic,  // continuous k1 * N / f
};

/// Quantized elapsed time. The residual terms only apply when N mod f > 0;
/// an empty result set costs nothing (no trip, so no k2 * f either).
[[nodiscard]] inline double predict_elapsed(const FetchPlan& plan, const CostConstants& k) noexcept {
    if (plan.total_records() == 0) {
        return 0.0;
    }
    double elapsed = k.k1 * static_cast<double>(plan.full_trips()) +
                     k.k2 * static_cast<double>(plan.prefetch_size());
    if (plan.has_residual_trip()) {
        elapsed += k.k3 + k.k4 * static_cast<double>(plan.residual_records());
    }
    return elapsed;
}

/// Continuous rectangular hyperbola k1 * N / f (real division, no trip quantization).
[[nodiscard]] inline double predict_elapsed_hyperbolic(count_t records, count_t prefetch, double k1) {
    if (prefetch == 0) {
        throw std::invalid_argument("prefetch size must be >= 1");
    }
    return k1 * static_cast<double>(records) / static_cast<double>(prefetch);
}

/// Trips saved by raising the prefetch size from f to f + 1. Never negative.
[[nodiscard]] inline count_t trip_decrease_per_unit_f(count_t records, count_t prefetch) {
    return round_trips(records, prefetch) - round_trips(records, prefetch + 1);
}

struct SlopeRow {
    count_t prefetch_size = 0;
    count_t trips = 0;
    count_t trips_next = 0;
    count_t decrease = 0;
    double slope_ms = 0.0;  // decrease * avg trip time
};

[[nodiscard]] inline std::vector<SlopeRow> slope_table(count_t records, const std::vector<count_t>& prefetch_sizes,
                                                       double avg_trip_time_ms) {
    std::vector<SlopeRow> rows;
    rows.reserve(prefetch_sizes.size());
    for (auto f : prefetch_sizes) {
        SlopeRow row;
        row.prefetch_size = f;
        row.trips = round_trips(records, f);
        row.trips_next = round_trips(records, f + 1);
        row.decrease = row.trips - row.trips_next;
        row.slope_ms = static_cast<double>(row.decrease) * avg_trip_time_ms;
        rows.push_back(row);
    }
    return rows;
}

/// Elapsed time at every f in [first, last]. An empty range (first > last) gives no points.
[[nodiscard]] inline std::vector<CurvePoint> sweep_curve(count_t records, count_t first, count_t last,
                                                         const CostConstants& k, CurveMode mode) {
    if (first == 0) {
        throw std::invalid_argument("sweep range must start at f >= 1");
    }
    std::vector<CurvePoint> points;
    if (first > last) {
        return points;
    }
    points.reserve(last - first + 1);
    for (count_t f = first; f <= last; ++f) {
        const double elapsed = mode == CurveMode::hyperbolic ? predict_elapsed_hyperbolic(records, f, k.k1)
                                                             : predict_elapsed(FetchPlan(records, f), k);
        points.push_back({f, elapsed});
        if (f == last) {
            break;  // guards last == UINT64_MAX
        }
    }
    return points;
}

[[nodiscard]] inline std::string to_string(CurveMode mode) {
    return mode == CurveMode::hyperbolic ? "hyperbolic" : "quantized";
}

}  // namespace rowfetch
