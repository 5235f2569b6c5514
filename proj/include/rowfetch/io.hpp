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

// Interchange formats: trace CSVs, fit-sample CSV, curve/sweep TSV and flat
// JSON objects. Numbers are written in shortest round-trip form so that
// identical runs produce identical bytes.

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rowfetch/config.hpp"
#include "rowfetch/core_model.hpp"
#include "rowfetch/errors.hpp"
#include "rowfetch/fetch_sim.hpp"
#include "rowfetch/model_fit.hpp"
#include "rowfetch/trace_analysis.hpp"
#include "rowfetch/tuner.hpp"

namespace rowfetch {

inline constexpr std::string_view kSamplesHeader = "row_index,elapsed_ms";
inline constexpr std::string_view kTripsHeader = "trip_index,records,r_ms,e_ms,a_ms,t_ms,c_ms";
inline constexpr std::string_view kFitHeader = "f,elapsed_ms";
inline constexpr std::string_view kSweepHeader = "# f\telapsed_ms\ttrips\tslope_ms";

[[nodiscard]] inline std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

namespace detail {

[[nodiscard]] inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = line.find(sep);
        out.push_back(trim(line.substr(0, pos)));
        if (pos == std::string_view::npos) {
            return out;
        }
        line.remove_prefix(pos + 1);
    }
}

template <typename T>
[[nodiscard]] T parse_cell(std::string_view cell, int line_no, std::string_view column) {
    T value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    bool bad = ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty();
    if constexpr (std::is_floating_point_v<T>) {
        bad = bad || !std::isfinite(value);
    }
    if (bad) {
        throw format_error("line " + std::to_string(line_no) + ": column " + std::string(column) + ": cannot parse '" +
                           std::string(cell) + "'");
    }
    return value;
}

/// Reads the next non-empty line; false at end of input.
inline bool next_line(std::istream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            return true;
        }
    }
    return false;
}

inline void expect_header(std::istream& in, std::string_view header, int& line_no) {
    std::string line;
    if (!next_line(in, line, line_no) || trim(line) != header) {
        throw format_error("expected header '" + std::string(header) + "'");
    }
}

}  // namespace detail

inline void write_samples_csv(std::ostream& out, const LatencyTrace& trace) {
    out << kSamplesHeader << '\n';
    for (const auto& s : trace.samples) {
        out << s.row_index << ',' << format_number(s.elapsed_ms) << '\n';
    }
}

inline void write_trips_csv(std::ostream& out, const LatencyTrace& trace) {
    out << kTripsHeader << '\n';
    for (const auto& t : trace.trips) {
        out << t.trip_index << ',' << t.records << ',' << format_number(t.request_ms) << ','
            << format_number(t.execution_ms) << ',' << format_number(t.disk_access_ms) << ','
            << format_number(t.transport_ms) << ',' << format_number(t.conversion_ms) << '\n';
    }
}

[[nodiscard]] inline std::vector<RowSample> read_samples_csv(std::istream& in) {
    int line_no = 0;
    detail::expect_header(in, kSamplesHeader, line_no);
    std::vector<RowSample> samples;
    std::string line;
    while (detail::next_line(in, line, line_no)) {
        const auto cells = detail::split(line, ',');
        if (cells.size() != 2) {
            throw format_error("line " + std::to_string(line_no) + ": expected 2 columns");
        }
        samples.push_back({detail::parse_cell<count_t>(cells[0], line_no, "row_index"),
                           detail::parse_cell<double>(cells[1], line_no, "elapsed_ms")});
    }
    try {
        validate_samples(samples);
    } catch (const std::invalid_argument& e) {
        throw format_error(e.what());
    }
    return samples;
}

[[nodiscard]] inline std::vector<TripRecord> read_trips_csv(std::istream& in) {
    int line_no = 0;
    detail::expect_header(in, kTripsHeader, line_no);
    std::vector<TripRecord> trips;
    std::string line;
    while (detail::next_line(in, line, line_no)) {
        const auto cells = detail::split(line, ',');
        if (cells.size() != 7) {
            throw format_error("line " + std::to_string(line_no) + ": expected 7 columns");
        }
        TripRecord t;
        t.trip_index = detail::parse_cell<count_t>(cells[0], line_no, "trip_index");
        t.records = detail::parse_cell<count_t>(cells[1], line_no, "records");
        t.request_ms = detail::parse_cell<double>(cells[2], line_no, "r_ms");
        t.execution_ms = detail::parse_cell<double>(cells[3], line_no, "e_ms");
        t.disk_access_ms = detail::parse_cell<double>(cells[4], line_no, "a_ms");
        t.transport_ms = detail::parse_cell<double>(cells[5], line_no, "t_ms");
        t.conversion_ms = detail::parse_cell<double>(cells[6], line_no, "c_ms");
        trips.push_back(t);
    }
    return trips;
}

/// Two columns, f and elapsed, tab separated, no header.
inline void write_curve_tsv(std::ostream& out, const std::vector<CurvePoint>& points) {
    for (const auto& p : points) {
        out << p.prefetch_size << '\t' << format_number(p.elapsed_ms) << '\n';
    }
}

struct SweepRow {
    count_t prefetch_size = 0;
    double elapsed_ms = 0.0;
    count_t trips = 0;
    double slope_ms = 0.0;  // elapsed(f) - elapsed(f + 1)
};

inline void write_sweep_tsv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << r.prefetch_size << '\t' << format_number(r.elapsed_ms) << '\t' << r.trips << '\t'
            << format_number(r.slope_ms) << '\n';
    }
}

inline void write_fit_samples_csv(std::ostream& out, count_t records, const std::vector<FitSample>& samples) {
    out << "# N=" << records << '\n' << kFitHeader << '\n';
    for (const auto& s : samples) {
        out << s.prefetch_size << ',' << format_number(s.elapsed_ms) << '\n';
    }
}

/// `# N=<count>` comment line, then `f,elapsed_ms` header and rows.
[[nodiscard]] inline std::vector<FitSample> read_fit_samples_csv(std::istream& in) {
    std::optional<count_t> records;
    bool header_seen = false;
    std::vector<FitSample> samples;
    std::string line;
    int line_no = 0;
    while (detail::next_line(in, line, line_no)) {
        const auto text = detail::trim(line);
        if (text.front() == '#') {
            auto body = detail::trim(text.substr(1));
            if (body.substr(0, 2) == "N=") {
                if (records) {
                    throw format_error("line " + std::to_string(line_no) + ": duplicate N= line");
                }
                records = detail::parse_cell<count_t>(detail::trim(body.substr(2)), line_no, "N");
            }
            continue;
        }
        if (!header_seen) {
            if (text != kFitHeader) {
                throw format_error("line " + std::to_string(line_no) + ": expected header '" +
                                   std::string(kFitHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (!records) {
            throw format_error("missing '# N=<count>' line before samples");
        }
        const auto cells = detail::split(text, ',');
        if (cells.size() != 2) {
            throw format_error("line " + std::to_string(line_no) + ": expected 2 columns");
        }
        FitSample s;
        s.prefetch_size = detail::parse_cell<count_t>(cells[0], line_no, "f");
        s.elapsed_ms = detail::parse_cell<double>(cells[1], line_no, "elapsed_ms");
        s.total_records = *records;
        if (s.prefetch_size == 0 || s.elapsed_ms < 0.0) {
            throw format_error("line " + std::to_string(line_no) + ": need f >= 1 and elapsed_ms >= 0");
        }
        samples.push_back(s);
    }
    if (!records) {
        throw format_error("missing '# N=<count>' line");
    }
    if (!header_seen) {
        throw format_error("expected header '" + std::string(kFitHeader) + "'");
    }
    return samples;
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const PeakReport& r) {
    nlohmann::ordered_json j;
    j["peak_rows"] = r.peak_rows;
    j["inferred_prefetch"] = r.inferred_prefetch ? nlohmann::ordered_json(*r.inferred_prefetch) : nlohmann::ordered_json(nullptr);
    j["inter_peak_gaps"] = r.inter_peak_gaps;
    j["avg_trip_time"] = r.avg_trip_time_ms ? nlohmann::ordered_json(*r.avg_trip_time_ms) : nlohmann::ordered_json(nullptr);
    j["confidence"] = r.confidence;
    return j;
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const FitResult& r) {
    nlohmann::ordered_json j;
    j["k1"] = r.constants.k1;
    j["k2"] = r.constants.k2;
    j["k3"] = r.residual_terms_identifiable ? nlohmann::ordered_json(r.constants.k3) : nlohmann::ordered_json(nullptr);
    j["k4"] = r.residual_terms_identifiable ? nlohmann::ordered_json(r.constants.k4) : nlohmann::ordered_json(nullptr);
    j["avg_trip_time"] = r.constants.avg_trip_time;
    j["residual_rms"] = r.residual_rms;
    j["sample_count"] = r.sample_count;
    j["condition_number"] = r.condition_number;
    j["condition_warning"] = r.condition_warning;
    j["warnings"] = r.warnings;
    return j;
}

[[nodiscard]] inline nlohmann::ordered_json to_json(const Recommendation& r) {
    nlohmann::ordered_json j;
    j["threshold_f"] = r.threshold_f;
    j["optimal_f"] = r.optimal_f;
    j["round_trips_at_optimal"] = r.round_trips_at_optimal;
    j["predicted_elapsed"] = r.predicted_elapsed;
    j["memory_at_optimal"] = r.memory_at_optimal;
    j["memory_ok"] = r.memory_ok;
    j["rationale"] = r.rationale;
    return j;
}

}  // namespace rowfetch
