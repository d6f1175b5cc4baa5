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
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "damlab/dam.hpp"
#include "damlab/errors.hpp"

namespace damlab {

enum class SizeClass { Small, Large };

struct Labeled {
    Key key;
    SizeClass cls;
};

/// A two-sized input with its ground-truth stripe structure.
struct Instance {
    std::vector<Key> smalls;  // count S, unit volume each
    std::vector<Key> larges;  // count L/w, volume w each
    std::uint32_t w = 1;
    std::size_t k = 0;
    std::vector<std::size_t> stripe_sizes;  // k entries, in large counts
    std::uint64_t seed = 0;
    bool smalls_sorted = false;  // subproblem instances hand smalls over sorted

    std::size_t small_count() const { return smalls.size(); }
    std::size_t large_count() const { return larges.size(); }
    std::size_t large_volume() const { return larges.size() * w; }
    std::vector<Key> sorted_smalls() const;
    std::vector<Key> all_keys_sorted() const;
};

/// Per-large predecessor index (1-based into sorted smalls, 0 = before all)
/// and stripe id (1..k, ascending with predecessor index).
struct StripeAssignment {
    std::vector<std::size_t> predecessor_index;
    std::vector<std::size_t> stripe_id;
    std::size_t stripe_count = 0;
};

Instance gen_instance(std::size_t small_count, std::size_t large_count,
                      std::uint32_t w, std::size_t k,
                      const std::optional<std::vector<std::size_t>>& stripe_sizes,
                      std::uint64_t seed);

/// (k, run sizes) of the maximal Large runs in a sorted record sequence.
std::pair<std::size_t, std::vector<std::size_t>>
stripe_profile(std::span<const Labeled> sorted_records);

StripeAssignment brute_force_predecessors(std::span<const Key> sorted_smalls,
                                          std::span<const Key> larges);

/// Stripe ids from raw predecessor indices (rank among the distinct values).
StripeAssignment assignment_from_preds(std::vector<std::size_t> preds);

enum class SubproblemKind { SK, KKTilde, KK };

struct SubproblemParams {
    std::size_t k = 0;
    std::size_t small_count = 0;  // S-k only; must be >= k+1
    std::size_t large_count = 0;  // k-k~ only; must be >= k
    std::uint32_t w = 1;
    std::uint64_t seed = 0;
};

Instance gen_subproblem(SubproblemKind kind, const SubproblemParams& p);

// ---- text format ----
// header: DAMLAB1 S=<int> LCOUNT=<int> W=<int> K=<int> SEED=<int> [SORTED]
// then one record per line: `S <key>` or `L <key>`.

void write_instance(const Instance& inst, std::ostream& os);
Instance read_instance(std::istream& is);
void write_sorted_dump(std::span<const Labeled> sorted, const Instance& inst,
                       std::ostream& os);

// ---- disk staging ----

/// Contiguous on-disk run of same-width records.
struct Run {
    Addr start = 0;
    std::size_t count = 0;
    std::uint32_t width = 1;
};

/// Packed disk layout: widths <= B pack floor(B/w) per block; widths > B are
/// block-aligned at ceil(w/B) blocks per record.
std::size_t records_per_block(std::uint32_t w, std::size_t B);
std::size_t record_stride_blocks(std::uint32_t w, std::size_t B);
Addr slot_of(const Run& run, std::size_t index, std::size_t B);
std::size_t run_volume_slots(std::size_t count, std::uint32_t w, std::size_t B);

/// Stage keys on disk (cost-free input materialization).
Run materialize(DamSession& s, std::span<const Key> keys, std::uint32_t w);
/// Cost-free read-back for oracle checks.
std::vector<Key> peek_run(const DamSession& s, const Run& run);

}  // namespace damlab
