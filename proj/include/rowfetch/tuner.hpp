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

// Picks a prefetch size: find where raising f stops saving round trips, shrink
// to the smallest f with the same trip count, then respect the memory budget.

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rowfetch/core_model.hpp"

namespace rowfetch {

/// Consecutive zero-decrease sizes required before the curve counts as flat.
/// For N = 502 the trip-count plateaus are 24 (5 trips), 41 (4 trips) and
/// 82 (3 trips) sizes wide, so 50 lands on the 3-trip plateau at f = 168.
inline constexpr count_t kDefaultZeroRun = 50;

/// Smallest f that starts a run of `zero_run` consecutive sizes with no trip
/// decrease. `decrease(f)` gives trips saved going from f to f + 1. Capped at n.
template <typename DecreaseFn>
[[nodiscard]] count_t threshold_prefetch(count_t records, count_t zero_run, DecreaseFn&& decrease) {
    if (records == 0) {
        throw std::invalid_argument("threshold needs at least one record");
    }
    if (zero_run == 0) {
        throw std::invalid_argument("zero run length must be >= 1");
    }
    count_t run_start = 1;
    count_t run = 0;
    for (count_t f = 1; f < records + zero_run; ++f) {
        if (decrease(f) == 0) {
            if (++run == zero_run) {
                return std::min(run_start, records);
            }
        } else {
            run = 0;
            run_start = f + 1;
        }
    }
    return records;
}

[[nodiscard]] inline count_t threshold_prefetch(count_t records, count_t zero_run = kDefaultZeroRun) {
    return threshold_prefetch(records, zero_run, [records](count_t f) { return trip_decrease_per_unit_f(records, f); });
}

/// Smallest prefetch size that still needs no more trips than `threshold`.
[[nodiscard]] inline count_t optimal_prefetch(count_t records, count_t threshold) {
    if (threshold == 0 || threshold > records) {
        throw std::invalid_argument("threshold must lie in [1, records]");
    }
    const count_t trips = round_trips(records, threshold);
    return records / trips + (records % trips > 0 ? 1 : 0);
}

struct MemoryBudget {
    count_t max_bytes = 0;
    count_t record_bytes = 1;

    void validate() const {
        if (record_bytes == 0) {
            throw std::invalid_argument("record size must be >= 1 byte");
        }
        if (max_bytes < record_bytes) {
            throw std::invalid_argument("memory budget must hold at least one record");
        }
    }
};

struct MemoryCheck {
    bool ok = false;
    count_t bytes = 0;
    count_t max_feasible_f = 0;
};

[[nodiscard]] inline MemoryCheck check_memory(count_t prefetch, const MemoryBudget& budget) {
    budget.validate();
    MemoryCheck check;
    check.bytes = prefetch * budget.record_bytes;
    check.ok = check.bytes <= budget.max_bytes;
    check.max_feasible_f = budget.max_bytes / budget.record_bytes;
    return check;
}

struct Recommendation {
    count_t threshold_f = 0;
    count_t optimal_f = 0;
    count_t round_trips_at_optimal = 0;
    double predicted_elapsed = 0.0;  // ms
    count_t memory_at_optimal = 0;   // bytes
    bool memory_ok = true;           // false when the trip-optimal size had to be clamped
    std::vector<std::string> rationale;
};

using CostSource = std::function<CostConstants(count_t prefetch)>;

[[nodiscard]] inline Recommendation recommend(count_t records, const MemoryBudget& budget, const CostSource& costs,
                                              count_t zero_run = kDefaultZeroRun) {
    budget.validate();
    Recommendation rec;
    rec.threshold_f = threshold_prefetch(records, zero_run);
    const count_t trips_at_threshold = round_trips(records, rec.threshold_f);
    const count_t optimal = optimal_prefetch(records, rec.threshold_f);

    std::ostringstream line;
    line << "threshold f=" << rec.threshold_f << ": trip count stays at " << trips_at_threshold << " for "
         << zero_run << " consecutive sizes";
    rec.rationale.push_back(line.str());
    line.str("");
    line << "optimal f=" << optimal << ": smallest size that keeps " << trips_at_threshold << " round trips";
    rec.rationale.push_back(line.str());

    const auto memory = check_memory(optimal, budget);
    rec.memory_ok = memory.ok;
    rec.optimal_f = optimal;
    line.str("");
    if (memory.ok) {
        line << "memory at f=" << optimal << ": " << memory.bytes << " of " << budget.max_bytes << " bytes";
    } else {
        rec.optimal_f = memory.max_feasible_f;
        line << "memory clamp: f=" << optimal << " needs " << memory.bytes << " bytes, budget is " << budget.max_bytes
             << "; using f=" << rec.optimal_f << " (" << round_trips(records, rec.optimal_f)
             << " round trips instead of " << trips_at_threshold << ")";
    }
    rec.rationale.push_back(line.str());

    rec.round_trips_at_optimal = round_trips(records, rec.optimal_f);
    rec.memory_at_optimal = rec.optimal_f * budget.record_bytes;
    rec.predicted_elapsed = predict_elapsed(FetchPlan(records, rec.optimal_f), costs(rec.optimal_f));
    return rec;
}

/// Plain-text recommendation laid out as bottleneck / change / tradeoff / benefit.
[[nodiscard]] inline std::string format_report(const Recommendation& rec, count_t records, count_t current_f,
                                               double current_elapsed_ms) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(1);
    out << "Bottleneck:        " << round_trips(records, current_f) << " round trips to fetch " << records
        << " records at effective prefetch size " << current_f << "\n";
    out << "Change:            set and enforce prefetch size " << rec.optimal_f << " (threshold " << rec.threshold_f
        << ") through driver-specific APIs; " << rec.round_trips_at_optimal << " round trips\n";
    out << "Tradeoff:          " << rec.memory_at_optimal << " bytes of client memory per result set"
        << (rec.memory_ok ? "" : " (clamped by memory budget)") << "\n";
    out << "Estimated benefit: " << current_elapsed_ms << " ms -> " << rec.predicted_elapsed << " ms\n";
    for (const auto& line : rec.rationale) {
        out << "  - " << line << "\n";
    }
    out << "Not covered: server co-location, staging-store removal, record limits and column sizing.\n";
    return out.str();
}

}  // namespace rowfetch
