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

// Infers the effective prefetch size from per-row retrieval latencies. Rows
// served from the driver's local cache cost almost nothing; the row that
// triggers the next round trip shows up as a peak. The modal spacing between
// peaks is the prefetch size.
//
// What counts as a peak is not a standard definition; the rule used here is:
//   * if more than half the samples are exactly zero (pure cache hits), the
//     zeros are dropped and a sample is a peak when it exceeds
//     median(nonzero) / ratio;
//   * otherwise, with m = median(all), the noise floor is the set of samples
//     <= ratio * m and a sample is a peak when it exceeds
//     max(ratio * m, mean(floor) + sigma_multiplier * stddev(floor)).
// Both branches are linear in the samples, so scaling a trace by a positive
// constant never changes the detected rows.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rowfetch/core_model.hpp"
#include "rowfetch/fetch_sim.hpp"

namespace rowfetch {

struct PeakPolicy {
    double ratio = 10.0;
    double sigma_multiplier = 3.0;

    void validate() const {
        if (!(ratio > 0.0) || !(sigma_multiplier >= 0.0)) {
            throw std::invalid_argument("peak policy: ratio must be > 0 and sigma multiplier >= 0");
        }
    }
};

struct PeakReport {
    std::vector<count_t> peak_rows;
    std::optional<count_t> inferred_prefetch;
    std::vector<count_t> inter_peak_gaps;
    std::optional<double> avg_trip_time_ms;
    double confidence = 0.0;
};

namespace detail {

[[nodiscard]] inline double median(std::vector<double> values) {
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace detail

/// Latency above which a sample counts as a peak, or nullopt when the trace is
/// flat (every sample identical) and nothing can stand out.
[[nodiscard]] inline std::optional<double> peak_threshold(std::span<const RowSample> samples,
                                                          const PeakPolicy& policy = {}) {
    policy.validate();
    if (samples.empty()) {
        throw std::invalid_argument("peak detection needs at least one sample");
    }
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) {
        values.push_back(s.elapsed_ms);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
        return std::nullopt;
    }

    const auto zeros = static_cast<std::size_t>(std::count(values.begin(), values.end(), 0.0));
    if (2 * zeros > values.size()) {
        std::vector<double> nonzero;
        nonzero.reserve(values.size() - zeros);
        std::copy_if(values.begin(), values.end(), std::back_inserter(nonzero), [](double v) { return v != 0.0; });
        return detail::median(std::move(nonzero)) / policy.ratio;
    }

    const double med = detail::median(values);
    const double ceiling = policy.ratio * med;
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t floor_count = 0;
    for (double v : values) {
        if (v <= ceiling) {
            sum += v;
            sum_sq += v * v;
            ++floor_count;
        }
    }
    double spread_bound = 0.0;
    if (floor_count > 0) {
        const double mean = sum / static_cast<double>(floor_count);
        const double var = std::max(0.0, sum_sq / static_cast<double>(floor_count) - mean * mean);
        spread_bound = mean + policy.sigma_multiplier * std::sqrt(var);
    }
    return std::max(ceiling, spread_bound);
}

/// Rows whose latency exceeds the peak threshold, in trace order.
[[nodiscard]] inline std::vector<count_t> detect_peaks(std::span<const RowSample> samples,
                                                       const PeakPolicy& policy = {}) {
    std::vector<count_t> rows;
    const auto threshold = peak_threshold(samples, policy);
    if (!threshold) {
        return rows;
    }
    for (const auto& s : samples) {
        if (s.elapsed_ms > *threshold) {
            rows.push_back(s.row_index);
        }
    }
    return rows;
}

/// Modal inter-peak gap as the prefetch size. Ties go to the gap matching the
/// first peak's offset from `first_row` (executeQuery hides trip 1, so the
/// first peak should sit at row f + 1), then to the smallest gap. An offset
/// that disagrees with the estimate counts as one extra piece of dissenting
/// evidence against the confidence.
[[nodiscard]] inline PeakReport infer_effective_prefetch(std::span<const count_t> peaks, count_t first_row = 1) {
    PeakReport report;
    report.peak_rows.assign(peaks.begin(), peaks.end());
    if (peaks.size() < 2) {
        return report;
    }
    std::map<count_t, count_t> histogram;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        if (peaks[i] <= peaks[i - 1]) {
            throw std::invalid_argument("peak rows must be strictly increasing");
        }
        const count_t gap = peaks[i] - peaks[i - 1];
        report.inter_peak_gaps.push_back(gap);
        ++histogram[gap];
    }

    count_t best_count = 0;
    for (const auto& [gap, n] : histogram) {
        best_count = std::max(best_count, n);
    }
    const std::optional<count_t> offset =
        peaks.front() > first_row ? std::optional<count_t>(peaks.front() - first_row) : std::nullopt;

    count_t modal = 0;
    if (offset) {
        auto it = histogram.find(*offset);
        if (it != histogram.end() && it->second == best_count) {
            modal = *offset;
        }
    }
    if (modal == 0) {
        for (const auto& [gap, n] : histogram) {  // ascending, so the first hit is the smallest
            if (n == best_count) {
                modal = gap;
                break;
            }
        }
    }

    const double gaps = static_cast<double>(report.inter_peak_gaps.size());
    report.inferred_prefetch = modal;
    report.confidence = static_cast<double>(best_count) / gaps;
    if (offset != modal) {
        report.confidence *= gaps / (gaps + 1.0);
    }
    return report;
}

/// Mean latency over the peak rows, or nullopt without peaks.
[[nodiscard]] inline std::optional<double> avg_trip_time_from_trace(std::span<const RowSample> samples,
                                                                   std::span<const count_t> peaks) {
    if (peaks.empty()) {
        return std::nullopt;
    }
    double total = 0.0;
    for (count_t row : peaks) {
        auto it = std::lower_bound(samples.begin(), samples.end(), row,
                                   [](const RowSample& s, count_t r) { return s.row_index < r; });
        if (it == samples.end() || it->row_index != row) {
            throw std::invalid_argument("peak row not present in trace");
        }
        total += it->elapsed_ms;
    }
    return total / static_cast<double>(peaks.size());
}

/// Peak detection, prefetch inference and trip-time estimate in one pass.
[[nodiscard]] inline PeakReport analyze_trace(std::span<const RowSample> samples, const PeakPolicy& policy = {}) {
    if (samples.empty()) {
        return {};
    }
    const auto peaks = detect_peaks(samples, policy);
    auto report = infer_effective_prefetch(peaks, samples.front().row_index);
    report.avg_trip_time_ms = avg_trip_time_from_trace(samples, peaks);
    return report;
}

/// Checks the row-index invariant of an externally supplied trace: strictly
/// increasing, contiguous from 1, no negative latencies.
inline void validate_samples(std::span<const RowSample> samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].row_index != i + 1) {
            throw std::invalid_argument("trace rows must be contiguous from 1 (row " + std::to_string(i + 1) +
                                        " has index " + std::to_string(samples[i].row_index) + ")");
        }
        if (!(samples[i].elapsed_ms >= 0.0) || !std::isfinite(samples[i].elapsed_ms)) {
            throw std::invalid_argument("trace latency at row " + std::to_string(i + 1) +
                                        " must be finite and non-negative");
        }
    }
}

}  // namespace rowfetch
