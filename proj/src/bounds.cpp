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
#include "damlab/bounds.hpp"

#include <cmath>
#include <sstream>

#include "damlab/errors.hpp"

namespace damlab::bounds {

double log2c(double x) { return x <= 1.0 ? 0.0 : std::log2(x); }

double logc(double base, double x) {
    const double b = base < 2.0 ? 2.0 : base;
    return x <= 1.0 ? 0.0 : std::log2(x) / std::log2(b);
}

double ram_bound(std::size_t n, std::size_t k, std::span<const std::size_t> stripe_sizes,
                 double a, double b, double c) {
    if (n < 1) throw ParamError("ram_bound needs n >= 1");
    if (k < 1 || k > n) throw ParamError("ram_bound needs 1 <= k <= n");
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    double stripe_term = 0.0;
    for (std::size_t l : stripe_sizes) {
        const double dl = static_cast<double>(l);
        stripe_term += dl * log2c(dl);
    }
    return a * dn * log2c(dn) + b * (dk * log2c(dn) + dn * log2c(dk)) + c * stripe_term;
}

static void check_dam_params(double B, double M) {
    if (M <= 1.0) throw ParamError("need M >= 2");
    if (B < 1.0 || M <= B) throw ParamError("need M > B >= 1");
}

MinTerms ple_lower_terms(double S, double L, double w, double k, double B, double M) {
    check_dam_params(B, M);
    if (S <= 0 || L <= 0 || w <= 0 || k <= 0) throw ParamError("arguments must be positive");
    MinTerms t;
    t.term1 = (k * w / B) * logc(M, S) + (L / B) * logc(M, k);
    t.term2 = (k / B) * log2c(S) + (L / (w * B)) * log2c(k) + L / B;
    return t;
}

double ple_lower(double S, double L, double w, double k, double B, double M) {
    return ple_lower_terms(S, L, w, k, B, M).value();
}

MinTerms ple_upper_terms(double S, double L, double w, double k, double B, double M) {
    if (B < 2.0) throw ParamError("need B >= 2");
    if (M < 2.0) throw ParamError("need M >= 2");
    if (S <= 0 || L <= 0 || w <= 0 || k <= 0) throw ParamError("arguments must be positive");
    MinTerms t;
    t.term1 = (L / B) * logc(M, S) + S / B;
    t.term2 = (L / w) * logc(B, k) + k * logc(B, S) + L / B + S / B;
    return t;
}

double ple_upper(double S, double L, double w, double k, double B, double M) {
    return ple_upper_terms(S, L, w, k, B, M).value();
}

double sort_bound(double S, double L, double w, std::span<const double> stripe_volumes,
                  double B, double M, double ple_value) {
    check_dam_params(B, M);
    double vol_sum = 0.0;
    double stripe_term = 0.0;
    for (double v : stripe_volumes) {
        if (v <= 0) throw ParamError("stripe volumes must be positive");
        vol_sum += v;
        stripe_term += (v / B) * logc(M / w, v / w);
    }
    if (std::abs(vol_sum - L) > 1e-9 * (L + 1.0))
        throw ParamError("stripe volumes must sum to L");
    return (S / B) * logc(M / B, S / B) + ple_value + stripe_term + L / B;
}

double av_bound(double V, double w, double B, double M) {
    check_dam_params(B, M);
    if (V <= 0 || w <= 0) throw ParamError("arguments must be positive");
    if (w >= B && M / w < 2.0) throw ParamError("need M/w >= 2 for the wide case");
    if (w < B) return (V / B) * logc(M / B, V / B);
    return (V / B) * logc(M / w, V / w);
}

std::string BoundReport::as_lines() const {
    std::ostringstream os;
    for (const auto& [name, value] : entries) os << name << '=' << value << '\n';
    return os.str();
}

std::string BoundReport::as_csv() const {
    std::ostringstream head, row;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) {
            head << ',';
            row << ',';
        }
        head << entries[i].first;
        row << entries[i].second;
    }
    return head.str() + "\n" + row.str() + "\n";
}

BoundReport bound_report(double S, double L, double w, double k, double B, double M) {
    const MinTerms lo = ple_lower_terms(S, L, w, k, B, M);
    const MinTerms up = ple_upper_terms(S, L, w, k, B, M);
    BoundReport r;
    r.entries = {
        {"S", S},
        {"L", L},
        {"w", w},
        {"k", k},
        {"B", B},
        {"M", M},
        {"ple_lower_term1", lo.term1},
        {"ple_lower_term2", lo.term2},
        {"ple_lower", lo.value()},
        {"ple_upper_bfs", up.term1},
        {"ple_upper_dfs", up.term2},
        {"ple_upper", up.value()},
    };
    return r;
}

}  // namespace damlab::bounds
