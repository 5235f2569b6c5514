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

// Least-squares recovery of the quantized cost-model constants from
// (prefetch size, elapsed) observations over a fixed result-set size.
//
// Basis columns: [ floor(N/f), f, 1{N mod f > 0}, N mod f ]  ->  k1, k2, k3, k4.
// Coefficients are constrained to be non-negative. With at most four unknowns
// the exact NNLS optimum is found by solving every subset of free columns and
// keeping the best feasible one.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rowfetch/core_model.hpp"
#include "rowfetch/errors.hpp"

namespace rowfetch {

struct FitSample {
    count_t prefetch_size = 1;
    double elapsed_ms = 0.0;
    count_t total_records = 0;
};

struct FitResult {
    CostConstants constants;
    bool residual_terms_identifiable = true;  // false: k3/k4 carry no information
    double residual_rms = 0.0;
    count_t sample_count = 0;
    double condition_number = 1.0;  // of the normal matrix
    bool condition_warning = false;
    std::vector<std::string> warnings;
};

inline constexpr double kConditionWarningLimit = 1e8;
inline constexpr std::array<const char*, 4> kBasisNames = {"full_trips", "prefetch_size", "residual_trip",
                                                           "residual_records"};

namespace detail {

[[nodiscard]] inline std::array<double, 4> basis_row(count_t records, count_t f) {
    const count_t residual = records % f;
    return {static_cast<double>(records / f), static_cast<double>(f), residual > 0 ? 1.0 : 0.0,
            static_cast<double>(residual)};
}

}  // namespace detail

[[nodiscard]] inline FitResult fit_cost_model(std::span<const FitSample> samples) {
    if (samples.size() < 4) {
        throw model_error("cost model fit needs at least 4 samples, got " + std::to_string(samples.size()));
    }
    const count_t records = samples.front().total_records;
    std::set<count_t> distinct_f;
    for (const auto& s : samples) {
        if (s.total_records != records) {
            throw model_error("all samples must share one record count (saw " + std::to_string(records) + " and " +
                              std::to_string(s.total_records) + ")");
        }
        if (s.prefetch_size == 0) {
            throw model_error("sample prefetch size must be >= 1");
        }
        if (!(s.elapsed_ms >= 0.0) || !std::isfinite(s.elapsed_ms)) {
            throw model_error("sample elapsed time must be finite and non-negative");
        }
        distinct_f.insert(s.prefetch_size);
    }
    if (distinct_f.size() < 4) {
        throw model_error("cost model fit needs at least 4 distinct prefetch sizes, got " +
                          std::to_string(distinct_f.size()));
    }

    const auto m = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd design(m, 4);
    Eigen::VectorXd observed(m);
    bool any_residual = false;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const auto row = detail::basis_row(s.total_records, s.prefetch_size);
        for (Eigen::Index c = 0; c < 4; ++c) {
            design(i, c) = row[static_cast<std::size_t>(c)];
        }
        observed(i) = s.elapsed_ms;
        any_residual = any_residual || row[2] > 0.0;
    }

    FitResult result;
    result.sample_count = samples.size();
    std::vector<Eigen::Index> active = {0, 1};
    if (any_residual) {
        active.push_back(2);
        active.push_back(3);
    } else {
        result.residual_terms_identifiable = false;
        result.warnings.emplace_back("no sample has a residual trip; k3 and k4 are unidentifiable");
    }
    const auto n_active = static_cast<Eigen::Index>(active.size());
    const Eigen::MatrixXd x = design(Eigen::all, active);

    // Rank on column-normalized design so that scale differences do not mask collinearity.
    Eigen::MatrixXd normalized = x;
    for (Eigen::Index c = 0; c < n_active; ++c) {
        const double norm = normalized.col(c).norm();
        if (norm > 0.0) {
            normalized.col(c) /= norm;
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> rank_lu(normalized);
    rank_lu.setThreshold(1e-10);
    if (rank_lu.rank() < n_active) {
        const Eigen::MatrixXd kernel = rank_lu.kernel();
        std::string names;
        for (Eigen::Index c = 0; c < n_active; ++c) {
            if (kernel.row(c).cwiseAbs().maxCoeff() > 1e-9) {
                names += names.empty() ? "" : ", ";
                names += kBasisNames[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])];
            }
        }
        throw model_error("rank-deficient design matrix; collinear basis columns: " + names);
    }

    const Eigen::MatrixXd normal = x.transpose() * x;
    const Eigen::VectorXd moment = x.transpose() * observed;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(normal);
    const auto& sv = svd.singularValues();
    result.condition_number = sv(0) / sv(sv.size() - 1);
    if (result.condition_number > kConditionWarningLimit) {
        result.condition_warning = true;
        result.warnings.emplace_back("normal matrix is ill-conditioned");
    }

    // Exhaustive active-set NNLS: subsets visited from largest to smallest so
    // the unconstrained solution wins ties.
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n_active);
    double best_sse = observed.squaredNorm();
    const unsigned full_mask = (1u << n_active) - 1u;
    bool found = false;
    for (unsigned mask = full_mask; mask > 0; --mask) {
        std::vector<Eigen::Index> free_cols;
        for (Eigen::Index c = 0; c < n_active; ++c) {
            if (mask & (1u << c)) {
                free_cols.push_back(c);
            }
        }
        const Eigen::MatrixXd sub_normal = normal(free_cols, free_cols);
        const Eigen::VectorXd sub_moment = moment(free_cols);
        const Eigen::VectorXd coef = Eigen::FullPivLU<Eigen::MatrixXd>(sub_normal).solve(sub_moment);
        if ((coef.array() < 0.0).any()) {
            continue;
        }
        Eigen::VectorXd full = Eigen::VectorXd::Zero(n_active);
        full(free_cols) = coef;
        const double sse = (x * full - observed).squaredNorm();
        if (!found || sse < best_sse) {
            best = full;
            best_sse = sse;
            found = true;
        }
    }

    std::array<double, 4> k = {0.0, 0.0, 0.0, 0.0};
    for (Eigen::Index c = 0; c < n_active; ++c) {
        k[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])] = best(c);
    }
    Eigen::VectorXd unconstrained = Eigen::FullPivLU<Eigen::MatrixXd>(normal).solve(moment);
    for (Eigen::Index c = 0; c < n_active; ++c) {
        if (unconstrained(c) < 0.0) {
            result.warnings.emplace_back(std::string(kBasisNames[static_cast<std::size_t>(active[static_cast<std::size_t>(c)])]) +
                                         " coefficient was negative and is held at 0");
        }
    }

    result.constants.k1 = k[0];
    result.constants.k2 = k[1];
    result.constants.k3 = k[2];
    result.constants.k4 = k[3];
    result.constants.avg_trip_time = k[0] > 0.0 ? k[0] : 1.0;
    result.residual_rms = std::sqrt(std::max(0.0, best_sse) / static_cast<double>(m));
    return result;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

struct HopObservation {
    count_t hops = 0;
    double k1 = 0.0;
};

/// Ordinary least-squares line k1 = intercept + slope * hops.
[[nodiscard]] inline LineFit fit_k1_vs_hops(std::span<const HopObservation> points) {
    std::set<count_t> distinct;
    for (const auto& p : points) {
        distinct.insert(p.hops);
    }
    if (distinct.size() < 2) {
        throw model_error("k1-vs-hops fit needs at least 2 distinct hop counts");
    }
    const double n = static_cast<double>(points.size());
    double mean_h = 0.0;
    double mean_k = 0.0;
    for (const auto& p : points) {
        mean_h += static_cast<double>(p.hops);
        mean_k += p.k1;
    }
    mean_h /= n;
    mean_k /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& p : points) {
        const double dh = static_cast<double>(p.hops) - mean_h;
        sxy += dh * (p.k1 - mean_k);
        sxx += dh * dh;
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_k - fit.slope * mean_h;
    return fit;
}

}  // namespace rowfetch
