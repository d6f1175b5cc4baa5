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
#include "damlab/dam.hpp"

#include <algorithm>
#include <sstream>

namespace damlab {

std::size_t blocks_covering(Addr addr, std::size_t volume, std::size_t block) {
    if (volume == 0) return 0;
    const Addr first = addr / block;
    const Addr last = (addr + volume - 1) / block;
    return last - first + 1;
}

std::string CostLedger::dump_trace() const {
    std::ostringstream os;
    for (const auto& e : trace) os << e.kind << ' ' << e.addr << ' ' << e.volume << '\n';
    return os.str();
}

std::pair<std::uint64_t, std::uint64_t> CostLedger::replay() const {
    std::uint64_t r = 0, w = 0;
    for (const auto& e : trace) (e.kind == 'R' ? r : w) += 1;
    return {r, w};
}

DamSession::DamSession(std::size_t block, std::size_t memory)
    : block_(block), memory_(memory) {
    if (block == 0) throw ParamError("block size B must be positive");
    if (memory < block) throw ParamError("memory M must hold at least one block");
}

Addr DamSession::alloc(std::size_t volume) {
    const std::size_t rounded = ((volume + block_ - 1) / block_) * block_;
    const Addr start = slots_.size();
    slots_.resize(start + rounded);
    return start;
}

void DamSession::place(Addr addr, Key key, std::uint32_t width) {
    if (width == 0) throw ParamError("record width must be positive");
    if (addr + width > slots_.size()) throw ContractError("place outside allocated disk");
    slots_[addr] = Slot{key, width, true, true};
    for (std::uint32_t i = 1; i < width; ++i) slots_[addr + i] = Slot{0, 0, false, true};
}

const DamSession::Resident& DamSession::res(Handle h) const {
    auto it = resident_.find(h);
    if (it == resident_.end())
        throw ResidencyError("operation on non-resident record handle");
    return it->second;
}

std::vector<Handle> DamSession::load_block(std::size_t block_index) {
    const Addr lo = block_index * block_;
    const Addr hi = lo + block_;
    if (hi > slots_.size()) throw ContractError("load_block past end of disk");
    ledger_.on_read(lo, block_);

    std::vector<Handle> out;
    std::size_t incoming = 0;
    for (Addr a = lo; a < hi; ++a) {
        const Slot& s = slots_[a];
        if (!s.used || !s.head) continue;
        if (a + s.width > hi)
            throw ContractError("load_block over a record that spans blocks");
        auto it = by_home_.find(a);
        if (it != by_home_.end()) {
            out.push_back(it->second);  // re-read of an already resident record
            continue;
        }
        incoming += s.width;
    }
    if (used_ + incoming > memory_)
        throw ResidencyError("memory overflow on load_block");
    for (Addr a = lo; a < hi; ++a) {
        const Slot& s = slots_[a];
        if (!s.used || !s.head || by_home_.count(a)) continue;
        Handle h = next_handle_++;
        resident_.emplace(h, Resident{s.key, s.width, a, true});
        by_home_.emplace(a, h);
        out.push_back(h);
    }
    used_ += incoming;
    return out;
}

Handle DamSession::load_record(Addr head) {
    if (head >= slots_.size() || !slots_[head].head)
        throw ContractError("load_record: no record head at address");
    const Slot& s = slots_[head];
    ledger_.reads += blocks_covering(head, s.width, block_);
    if (ledger_.tracing)
        ledger_.trace.push_back({'R', head, s.width});
    // trace events are per call here; replay() counts events, so mirror the
    // multi-block charge with extra events when the record spans blocks
    if (ledger_.tracing) {
        for (std::size_t i = 1; i < blocks_covering(head, s.width, block_); ++i)
            ledger_.trace.push_back({'R', head + i * block_, 0});
    }
    auto it = by_home_.find(head);
    if (it != by_home_.end()) return it->second;
    if (used_ + s.width > memory_)
        throw ResidencyError("memory overflow on load_record");
    Handle h = next_handle_++;
    resident_.emplace(h, Resident{s.key, s.width, head, true});
    by_home_.emplace(head, h);
    used_ += s.width;
    return h;
}

void DamSession::write_slots(const Resident& r) {
    if (r.home + r.width > slots_.size())
        throw ContractError("write_back outside allocated disk");
    slots_[r.home] = Slot{r.key, r.width, true, true};
    for (std::uint32_t i = 1; i < r.width; ++i)
        slots_[r.home + i] = Slot{0, 0, false, true};
}

void DamSession::charge_extent_writes(std::vector<std::pair<Addr, std::size_t>>& extents) {
    std::sort(extents.begin(), extents.end());
    std::size_t i = 0;
    while (i < extents.size()) {
        Addr start = extents[i].first;
        Addr end = start + extents[i].second;
        std::size_t j = i + 1;
        while (j < extents.size() && extents[j].first <= end) {
            end = std::max(end, extents[j].first + extents[j].second);
            ++j;
        }
        const std::size_t nblocks = blocks_covering(start, end - start, block_);
        ledger_.writes += nblocks;
        if (ledger_.tracing) {
            ledger_.trace.push_back({'W', start, end - start});
            for (std::size_t b = 1; b < nblocks; ++b)
                ledger_.trace.push_back({'W', start + b * block_, 0});
        }
        i = j;
    }
}

void DamSession::evict(std::span<const Handle> handles, bool write_back) {
    std::vector<std::pair<Addr, std::size_t>> extents;
    for (Handle h : handles) {
        const Resident& r = res(h);
        if (write_back) {
            if (!r.has_home) throw ContractError("evict(write_back) of unhomed record");
            write_slots(r);
            extents.emplace_back(r.home, r.width);
        }
    }
    if (write_back) charge_extent_writes(extents);
    for (Handle h : handles) {
        auto it = resident_.find(h);
        used_ -= it->second.width;
        if (it->second.has_home) by_home_.erase(it->second.home);
        resident_.erase(it);
    }
}

void DamSession::evict(Handle h, bool write_back) {
    evict(std::span<const Handle>(&h, 1), write_back);
}

void DamSession::rehome(Handle h, Addr new_head) {
    auto it = resident_.find(h);
    if (it == resident_.end()) throw ResidencyError("rehome of non-resident record");
    if (new_head + it->second.width > slots_.size())
        throw ContractError("rehome outside allocated disk");
    if (it->second.has_home) by_home_.erase(it->second.home);
    auto prev = by_home_.find(new_head);
    if (prev != by_home_.end()) {
        // the destination is being overwritten; orphan the old occupant
        resident_[prev->second].has_home = false;
        by_home_.erase(prev);
    }
    it->second.home = new_head;
    it->second.has_home = true;
    by_home_.emplace(new_head, h);
}

Handle DamSession::clone(Handle h) {
    const Resident r = res(h);
    if (used_ + r.width > memory_) throw ResidencyError("memory overflow on clone");
    Handle c = next_handle_++;
    resident_.emplace(c, Resident{r.key, r.width, 0, false});
    used_ += r.width;
    return c;
}

Handle DamSession::make_record(Key key, std::uint32_t width) {
    if (width == 0) throw ParamError("record width must be positive");
    if (used_ + width > memory_) throw ResidencyError("memory overflow on make_record");
    Handle c = next_handle_++;
    resident_.emplace(c, Resident{key, width, 0, false});
    used_ += width;
    return c;
}

std::strong_ordering DamSession::compare(Handle a, Handle b) {
    const Key ka = res(a).key;
    const Key kb = res(b).key;
    if (ka == kb) throw ContractError("compare of equal keys violates distinctness");
    return ka < kb ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::strong_ordering DamSession::compare_key(Handle h, Key probe) {
    const Key k = res(h).key;
    if (k == probe) return std::strong_ordering::equal;
    return k < probe ? std::strong_ordering::less : std::strong_ordering::greater;
}

Key DamSession::key_of(Handle h) const { return res(h).key; }
Addr DamSession::home_of(Handle h) const {
    const Resident& r = res(h);
    if (!r.has_home) throw ContractError("home_of unhomed record");
    return r.home;
}
std::uint32_t DamSession::width_of(Handle h) const { return res(h).width; }
bool DamSession::is_resident(Handle h) const { return resident_.count(h) != 0; }

bool DamSession::slot_has_head(Addr addr) const {
    return addr < slots_.size() && slots_[addr].head;
}
Key DamSession::peek_key(Addr addr) const {
    if (!slot_has_head(addr)) throw ContractError("peek at non-head slot");
    return slots_[addr].key;
}
std::uint32_t DamSession::peek_width(Addr addr) const {
    if (!slot_has_head(addr)) throw ContractError("peek at non-head slot");
    return slots_[addr].width;
}

}  // namespace damlab
