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

// Flat dotted key=value run configuration, e.g.
//
//   workload.total_records=502
//   workload.field_bytes=40,40,20
//   network.hop.1.bandwidth_bytes_per_ms=100
//   network.hop.1.base_latency_ms=40
//   driver.default_prefetch=10
//   run.seed=7
//
// '#' starts a comment line. Unknown or repeated keys are errors.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "rowfetch/errors.hpp"
#include "rowfetch/fetch_sim.hpp"

namespace rowfetch {

struct RunConfig {
    Scenario scenario;
    std::optional<std::uint64_t> seed;
    double jitter = 0.0;

    [[nodiscard]] std::uint64_t effective_seed() const noexcept { return seed.value_or(0); }
};

namespace detail {

[[nodiscard]] inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class ConfigReader {
public:
    void add(std::string key, std::string value, int line) {
        if (entries_.count(key) > 0) {
            throw format_error("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        }
        entries_.emplace(std::move(key), Entry{std::move(value), line});
    }

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) > 0; }

    template <typename T>
    std::optional<T> take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        const Entry entry = it->second;
        entries_.erase(it);
        return parse<T>(key, entry);
    }

    template <typename T>
    T require(const std::string& key) {
        auto v = take<T>(key);
        if (!v) {
            throw format_error(key + ": required key is missing");
        }
        return *v;
    }

    std::vector<count_t> take_list(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            throw format_error(key + ": required key is missing");
        }
        const Entry entry = it->second;
        entries_.erase(it);
        std::vector<count_t> out;
        std::string_view rest = entry.value;
        while (true) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            out.push_back(parse<count_t>(key, Entry{std::string(item), entry.line}));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        return out;
    }

    void reject_leftovers() const {
        if (!entries_.empty()) {
            const auto& [key, entry] = *entries_.begin();
            throw format_error("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
        }
    }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };

    template <typename T>
    static T parse(const std::string& key, const Entry& entry) {
        T value{};
        const char* begin = entry.value.data();
        const char* end = begin + entry.value.size();
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        bool bad = ec != std::errc{} || ptr != end || entry.value.empty();
        if constexpr (std::is_floating_point_v<T>) {
            bad = bad || !std::isfinite(value);
        }
        if (bad) {
            const char* expected = std::is_floating_point_v<T> ? "a number" : "a non-negative integer";
            throw format_error("line " + std::to_string(entry.line) + ": " + key + ": expected " + expected +
                               ", got '" + entry.value + "'");
        }
        return value;
    }

    std::map<std::string, Entry> entries_;
};

template <typename Fn>
void check_field(const std::string& key, Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw format_error(key + ": " + e.what());
    }
}

}  // namespace detail

/// Parses config text. `seed_override` (e.g. from the environment) replaces run.seed.
[[nodiscard]] inline RunConfig parse_config(std::string_view text,
                                            std::optional<std::uint64_t> seed_override = std::nullopt) {
    detail::ConfigReader reader;
    int line_no = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        const auto raw = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw format_error("line " + std::to_string(line_no) + ": expected key=value");
        }
        const auto key = detail::trim(line.substr(0, eq));
        if (key.empty()) {
            throw format_error("line " + std::to_string(line_no) + ": empty key");
        }
        reader.add(std::string(key), std::string(detail::trim(line.substr(eq + 1))), line_no);
    }

    RunConfig cfg;
    auto& s = cfg.scenario;
    s.workload.total_records = reader.require<count_t>("workload.total_records");
    s.workload.field_byte_sizes = reader.take_list("workload.field_bytes");
    detail::check_field("workload.field_bytes", [&] { s.workload.validate(); });

    for (count_t i = 1;; ++i) {
        const std::string prefix = "network.hop." + std::to_string(i) + ".";
        if (!reader.has(prefix + "bandwidth_bytes_per_ms") && !reader.has(prefix + "base_latency_ms") &&
            !reader.has(prefix + "availability")) {
            break;
        }
        HopSpec hop;
        hop.bandwidth_bytes_per_ms = reader.require<double>(prefix + "bandwidth_bytes_per_ms");
        hop.base_latency_ms = reader.take<double>(prefix + "base_latency_ms").value_or(0.0);
        hop.availability = reader.take<double>(prefix + "availability").value_or(1.0);
        detail::check_field(prefix.substr(0, prefix.size() - 1), [&] { hop.validate(); });
        s.network.hops.push_back(hop);
    }

    s.server.hard_parse_ms = reader.take<double>("server.hard_parse_ms").value_or(0.0);
    s.server.soft_parse_ms = reader.take<double>("server.soft_parse_ms").value_or(0.0);
    s.server.per_record_search_ms = reader.take<double>("server.per_record_search_ms").value_or(0.0);
    s.server.cache_records = reader.take<count_t>("server.cache_records").value_or(1000);
    s.server.disk_access_per_refill_ms = reader.take<double>("server.disk_access_per_refill_ms").value_or(0.0);
    detail::check_field("server", [&] { s.server.validate(); });

    s.driver.default_prefetch = reader.take<count_t>("driver.default_prefetch").value_or(10);
    s.driver.recommended_prefetch =
        reader.take<count_t>("driver.recommended_prefetch").value_or(s.driver.default_prefetch);
    s.driver.enforced_prefetch = reader.take<count_t>("driver.enforced_prefetch");
    s.driver.per_field_conversion_ms = reader.take<double>("driver.per_field_conversion_ms").value_or(0.0);
    s.driver.request_overhead_ms = reader.take<double>("driver.request_overhead_ms").value_or(0.0);
    detail::check_field("driver", [&] { s.driver.validate(); });

    cfg.seed = reader.take<std::uint64_t>("run.seed");
    cfg.jitter = reader.take<double>("run.jitter").value_or(0.0);
    reader.reject_leftovers();

    if (seed_override) {
        cfg.seed = seed_override;
    }
    if (!(cfg.jitter >= 0.0 && cfg.jitter <= 1.0)) {
        throw format_error("run.jitter: must lie in [0, 1]");
    }
    if (cfg.jitter > 0.0 && !cfg.seed) {
        throw format_error("run.seed: required when run.jitter > 0");
    }
    return cfg;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path,
                                           std::optional<std::uint64_t> seed_override = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw format_error("cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), seed_override);
}

}  // namespace rowfetch
