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

#include <cstdint>
#include <span>
#include <vector>

#include "damlab/dam.hpp"

namespace damlab {

/// Comparison prices: a = red-red, b = red-blue, c = blue-blue.
struct PriceTriple {
    double a = 1.0;
    double b = 1.0;
    double c = 1.0;
};

struct RamLedger {
    std::uint64_t count_a = 0;
    std::uint64_t count_b = 0;
    std::uint64_t count_c = 0;
    double total_cost(const PriceTriple& p) const {
        return p.a * static_cast<double>(count_a) + p.b * static_cast<double>(count_b) +
               p.c * static_cast<double>(count_c);
    }
};

struct PricedSortResult {
    std::vector<Key> sorted;
    RamLedger ledger;
    /// Blues that descended the full red tree (one per discovered stripe).
    std::size_t red_tree_descents = 0;
    std::size_t stripes_discovered = 0;
};

/// Three-phase interleaving-sensitive sort: sort reds (cost a), route blues
/// through the border structure and, on stripe discovery, the red tree
/// (cost b), then sort each blue stripe internally (cost c).
/// Requires a <= b <= c and globally distinct keys.
PricedSortResult priced_sort(std::span<const Key> reds, std::span<const Key> blues,
                             const PriceTriple& prices);

/// Baseline: one mergesort over the union, each comparison charged by the
/// colors of its operands.
PricedSortResult naive_priced_sort(std::span<const Key> reds, std::span<const Key> blues,
                                   const PriceTriple& prices);

}  // namespace damlab
