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
#include <vector>

#include "damlab/core.hpp"
#include "damlab/dam.hpp"
#include "damlab/ple.hpp"

namespace damlab {

enum class PleAlgo { Auto, Dfs, Bfs };

/// Per-phase I/O totals; they add up exactly to the session ledger delta.
struct PhaseLedgers {
    std::uint64_t sort_smalls = 0;
    std::uint64_t ple = 0;
    std::uint64_t regroup = 0;
    std::uint64_t sort_stripes = 0;
    std::uint64_t emit = 0;
    std::uint64_t total() const {
        return sort_smalls + ple + regroup + sort_stripes + emit;
    }
};

struct TwoSizedOutput {
    Addr output_start = 0;
    std::size_t output_volume = 0;
    StripeAssignment assignment;
    std::vector<std::size_t> stripe_sizes;  // per discovered stripe, ascending
    PhaseLedgers phases;
    PleChoice choice;  // meaningful when PleAlgo::Auto ran
    PleStats ple_stats;
};

/// Sort a mixed input: sort the smalls, place every large (predecessor per
/// large), group the larges by stripe, sort each stripe, then interleave
/// smalls and stripes into one sequential output region.
TwoSizedOutput two_sized_sort(DamSession& s, const Run& smalls, const Run& larges,
                              PleAlgo algo = PleAlgo::Auto, std::size_t k_hint = 0,
                              bool smalls_presorted = false);

/// Cost-free key walk over a mixed-width output region, in slot order.
std::vector<Key> peek_mixed(const DamSession& s, Addr start, std::size_t volume);

}  // namespace damlab
