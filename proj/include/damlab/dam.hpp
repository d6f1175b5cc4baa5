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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "damlab/errors.hpp"

namespace damlab {

using Key = std::uint64_t;
/// Disk address in unit-volume slots.
using Addr = std::size_t;
/// Identity of a resident record.
using Handle = std::uint64_t;

struct TraceEvent {
    char kind;  // 'R' or 'W'
    Addr addr;
    std::size_t volume;
};

/// Exact I/O counters for one simulation session.
struct CostLedger {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    bool tracing = false;
    std::vector<TraceEvent> trace;

    std::uint64_t total_ios() const { return reads + writes; }
    void on_read(Addr addr, std::size_t vol) {
        reads += 1;
        if (tracing) trace.push_back({'R', addr, vol});
    }
    void on_write(Addr addr, std::size_t vol) {
        writes += 1;
        if (tracing) trace.push_back({'W', addr, vol});
    }
    /// Newline-delimited `R <addr> <vol>` / `W <addr> <vol>` events.
    std::string dump_trace() const;
    /// Recompute (reads, writes) from the trace. Used by the exactness audit.
    std::pair<std::uint64_t, std::uint64_t> replay() const;
};

/// One simulated disk + bounded internal memory + ledger.
///
/// Comparisons only succeed between resident records; every block transfer is
/// charged explicitly. There is no implicit caching or eviction.
class DamSession {
  public:
    DamSession(std::size_t block, std::size_t memory);

    std::size_t block_size() const { return block_; }
    std::size_t memory_size() const { return memory_; }
    CostLedger& ledger() { return ledger_; }
    const CostLedger& ledger() const { return ledger_; }

    // ---- layout (cost-free, used to stage inputs and reserve regions) ----

    /// Reserve `volume` slots starting at a block boundary.
    Addr alloc(std::size_t volume);
    /// Stage a record on disk without charging I/O (input materialization).
    void place(Addr addr, Key key, std::uint32_t width);

    // ---- charged primitives ----

    /// Bring every whole record of one block into memory. reads += 1.
    std::vector<Handle> load_block(std::size_t block_index);
    /// Bring one record (any width) into memory. reads += blocks covered.
    Handle load_record(Addr head);
    /// Release residency; if write_back, charge writes per contiguous extent
    /// of the records' home slots and persist them.
    void evict(std::span<const Handle> handles, bool write_back);
    void evict(Handle h, bool write_back);
    /// Reassign a resident record's home address (bookkeeping, free).
    void rehome(Handle h, Addr new_head);
    /// Duplicate a resident record in memory (free; consumes memory volume).
    /// The copy has no home until rehome() is called.
    Handle clone(Handle h);
    /// Build a fresh in-memory record from a key already held by the
    /// controller (free; consumes memory volume; unhomed like a clone).
    Handle make_record(Key key, std::uint32_t width);

    /// Key ordering of two resident records. Ledger unchanged.
    std::strong_ordering compare(Handle a, Handle b);
    /// Compare a resident record against an in-memory probe key.
    std::strong_ordering compare_key(Handle h, Key probe);
    /// Key of a resident record (in-memory access, free).
    Key key_of(Handle h) const;
    Addr home_of(Handle h) const;
    std::uint32_t width_of(Handle h) const;
    bool is_resident(Handle h) const;

    std::size_t resident_volume() const { return used_; }
    std::size_t free_volume() const { return memory_ - used_; }

    // ---- cost-free inspection for tests and oracle verification ----
    bool slot_has_head(Addr addr) const;
    Key peek_key(Addr addr) const;
    std::uint32_t peek_width(Addr addr) const;
    std::size_t disk_volume() const { return slots_.size(); }

  private:
    struct Slot {
        Key key = 0;
        std::uint32_t width = 0;
        bool head = false;
        bool used = false;
    };
    struct Resident {
        Key key;
        std::uint32_t width;
        Addr home;       // npos_addr when unhomed (fresh clone)
        bool has_home;
    };

    const Resident& res(Handle h) const;
    void write_slots(const Resident& r);
    void charge_extent_writes(std::vector<std::pair<Addr, std::size_t>>& extents);

    std::size_t block_;
    std::size_t memory_;
    std::size_t used_ = 0;
    CostLedger ledger_;
    std::vector<Slot> slots_;
    std::unordered_map<Handle, Resident> resident_;
    std::unordered_map<Addr, Handle> by_home_;
    Handle next_handle_ = 1;
};

/// Blocks covered by the slot range [addr, addr + volume).
std::size_t blocks_covering(Addr addr, std::size_t volume, std::size_t block);

}  // namespace damlab
