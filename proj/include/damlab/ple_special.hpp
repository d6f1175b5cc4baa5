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
#include <optional>
#include <span>
#include <vector>

#include "damlab/core.hpp"
#include "damlab/dam.hpp"
#include "damlab/ple.hpp"

namespace damlab {

/// Sparse index over a sorted unit run: every beta-th key is sampled, a
/// static B-tree sits on top of the samples, and queries finish with a
/// block-probing binary search over one beta-wide base segment.
struct SampledIndex {
    Run base;
    Run samples;
    StaticBTree tree;
    std::size_t beta = 0;
    std::size_t sample_blocks = 0;
};

/// beta = ceil(N^(1 / log2 B)). Requires B >= 4.
SampledIndex build_sampled_index(DamSession& s, const Run& sorted_base);

/// 1-based predecessor position of `probe` in the base run. If `reads_used`
/// is given, receives the block reads spent by this query alone.
std::size_t query_sampled(DamSession& s, const SampledIndex& idx, Key probe,
                          std::uint64_t* reads_used = nullptr);

struct Interval {
    std::size_t lo = 0;
    std::size_t hi = 0;  // candidate predecessor positions in [lo, hi)
};

/// Batch predecessor tree: each node block holds B pivots, one per tracked
/// slot, and has 2^B children indexed by the B comparison outcomes. One
/// block read per level halves every slot's candidate interval. All slots
/// share the same initial interval, so any batch of B probes can descend.
struct TwoBTree {
    Run base;
    Interval domain;
    std::size_t alpha = 0;  // pivot levels below the boundary block
    Addr boundary = 0;      // block holding the extreme base keys
    std::vector<Addr> level_start;
    std::size_t node_count = 0;
};

/// node_budget 0 means DAMLAB_NODE_BUDGET from the environment, or 2^20.
TwoBTree build_2b_tree(DamSession& s, const Run& sorted_base, Interval domain,
                       std::size_t alpha, std::size_t node_budget = 0);

struct BatchQueryStats {
    std::uint64_t reads = 0;
    /// Widest tracked interval after each level; must halve level to level.
    std::vector<std::size_t> max_len_per_level;
    /// Per level, per probe slot: interval width after consuming the node.
    std::vector<std::vector<std::size_t>> widths;
};

/// Refine up to B probe intervals with alpha + 1 block reads.
std::vector<Interval> query_2b(DamSession& s, const TwoBTree& tree,
                               std::span<const Key> probes,
                               BatchQueryStats* stats = nullptr);

struct KkSortResult {
    Run sorted_larges;
    StripeAssignment assignment;
    std::size_t swipes = 0;
    double j_used = 0.0;
    std::uint64_t short_block_ios = 0;   // key copies, pivot nodes, boundary
    std::uint64_t large_record_ios = 0;  // moving the wide records themselves
};

/// Swipe sort for one large per gap: extract the large keys into unit-width
/// blocks, refine all predecessor intervals with g batched tree passes, and
/// resolve the last j bits during the emission merge-scan.
KkSortResult kk_sort_2b(DamSession& s, const Run& sorted_smalls, const Run& larges,
                        std::optional<double> j_override = std::nullopt,
                        std::size_t node_budget = 0);

}  // namespace damlab
