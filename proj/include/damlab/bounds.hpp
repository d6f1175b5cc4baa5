/*
 * Copyright 2026 the damlab authors
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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace damlab::bounds {

/// log2(x), 0 for x <= 1.
double log2c(double x);
/// log_base(x) with the base clamped to >= 2; 0 for x <= 1.
double logc(double base, double x);

/// Priced-comparison sorting cost form:
/// a*n*log n + b*(k*log n + n*log k) + c*sum_i l_i*log l_i.
double ram_bound(std::size_t n, std::size_t k, std::span<const std::size_t> stripe_sizes,
                 double a, double b, double c);

struct MinTerms {
    double term1;
    double term2;
    double value() const { return term1 < term2 ? term1 : term2; }
    bool first_selected() const { return term1 <= term2; }
};

/// min{ (kw/B) log_M S + (L/B) log_M k,  (k/B) log S + (L/(wB)) log k + L/B }.
MinTerms ple_lower_terms(double S, double L, double w, double k, double B, double M);
double ple_lower(double S, double L, double w, double k, double B, double M);

/// min{ (L/B) log_M S + S/B,  (L/w) log_B k + k log_B S + L/B + S/B }.
/// term1 is the batch-routing (BFS) form, term2 the per-element (DFS) form.
MinTerms ple_upper_terms(double S, double L, double w, double k, double B, double M);
double ple_upper(double S, double L, double w, double k, double B, double M);

/// (S/B) log_{M/B} (S/B) + ple + sum_i (L_i/B) log_{M/w} (L_i/w) + L/B,
/// with stripe volumes L_i in unit volume.
double sort_bound(double S, double L, double w, std::span<const double> stripe_volumes,
                  double B, double M, double ple_value);

/// Volume-V mergesort cost: case w < B uses log_{M/B}(V/B), case w >= B uses
/// log_{M/w}(V/w).
double av_bound(double V, double w, double B, double M);

struct BoundReport {
    std::vector<std::pair<std::string, double>> entries;
    std::string as_lines() const;
    std::string as_csv() const;  // header + one row
};

BoundReport bound_report(double S, double L, double w, double k, double B, double M);

}  // namespace damlab::bounds
