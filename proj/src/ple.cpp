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
#include "damlab/ple.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "damlab/bounds.hpp"

namespace damlab {

namespace {

// Handles of one loaded block, sorted by home address.
std::vector<Handle> load_block_sorted(DamSession& s, std::size_t block) {
    auto handles = s.load_block(block);
    std::sort(handles.begin(), handles.end(),
              [&](Handle a, Handle b) { return s.home_of(a) < s.home_of(b); });
    return handles;
}

// Append width-1 clones to a region, flushing one block at a time.
class UnitWriter {
  public:
    UnitWriter(DamSession& s, std::size_t capacity)
        : s_(s), out_{s.alloc(capacity), 0, 1} {}

    void append(Handle h) {
        pending_.push_back(h);
        if (pending_.size() == s_.block_size()) flush();
    }
    Run finish() {
        flush();
        return out_;
    }

  private:
    void flush() {
        if (pending_.empty()) return;
        for (Handle h : pending_) {
            s_.rehome(h, out_.start + out_.count);
            out_.count += 1;
        }
        s_.evict(std::span<const Handle>(pending_), /*write_back=*/true);
        pending_.clear();
    }

    DamSession& s_;
    Run out_;
    std::vector<Handle> pending_;
};

StripeAssignment finalize(std::vector<std::size_t> preds) {
    return assignment_from_preds(std::move(preds));
}

}  // namespace

StaticBTree build_static_btree(DamSession& s, const Run& sorted_base) {
    if (sorted_base.width != 1)
        throw ContractError("static btree expects a unit-width base");
    const std::size_t B = s.block_size();
    StaticBTree tree;
    tree.levels.push_back(sorted_base);
    while (tree.levels.back().count > B) {
        const Run& cur = tree.levels.back();
        const std::size_t blocks = blocks_covering(cur.start, cur.count, B);
        UnitWriter writer(s, run_volume_slots(blocks, 1, B));
        for (std::size_t b = 0; b < blocks; ++b) {
            auto handles = load_block_sorted(s, cur.start / B + b);
            writer.append(s.clone(handles.front()));
            s.evict(std::span<const Handle>(handles), /*write_back=*/false);
        }
        tree.levels.push_back(writer.finish());
    }
    return tree;
}

std::size_t btree_predecessor(DamSession& s, const StaticBTree& tree,
                              const std::function<bool(Handle)>& strictly_below) {
    const std::size_t B = s.block_size();
    if (tree.levels.empty() || tree.levels.front().count == 0) return 0;
    std::size_t blk_rel = 0;  // block within the current level's run
    std::size_t result = 0;
    for (std::size_t lvl = tree.levels.size(); lvl-- > 0;) {
        const Run& run = tree.levels[lvl];
        auto handles = load_block_sorted(s, run.start / B + blk_rel);
        std::size_t cnt = 0;
        while (cnt < handles.size() && strictly_below(handles[cnt])) cnt += 1;
        const std::size_t chosen =
            s.home_of(handles[cnt > 0 ? cnt - 1 : 0]) - run.start;
        s.evict(std::span<const Handle>(handles), /*write_back=*/false);
        if (lvl == 0) {
            result = cnt > 0 ? chosen + 1 : 0;
        } else {
            blk_rel = chosen;  // pivot i of level lvl heads block i below
        }
    }
    return result;
}

std::size_t PleStats::duplicate_node_loads() const {
    auto v = node_loads;
    std::sort(v.begin(), v.end());
    std::size_t dup = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] == v[i - 1]) dup += 1;
    return dup;
}

namespace {

// Clone the idx0-th element (0-based) of a sorted unit run; one block read.
Handle clone_base(DamSession& s, const Run& base, std::size_t idx0) {
    const std::size_t B = s.block_size();
    auto handles = load_block_sorted(s, (base.start + idx0) / B);
    Handle found = 0;
    for (Handle h : handles)
        if (s.home_of(h) == base.start + idx0) found = s.clone(h);
    s.evict(std::span<const Handle>(handles), /*write_back=*/false);
    if (found == 0) throw ContractError("missing base record");
    return found;
}

// Discovered stripe borders, held either as pinned resident clones or as a
// small on-disk B-tree that is rebuilt on each insertion.
class BorderSet {
  public:
    BorderSet(DamSession& s, BorderMode mode, std::size_t budget)
        : s_(s), budget_(budget),
          on_disk_(mode == BorderMode::Disk) {
        auto_spill_ = (mode == BorderMode::Auto);
    }

    bool on_disk() const { return on_disk_; }

    /// Number of borders strictly below the probe record.
    std::size_t rank_below(Handle probe) {
        if (!on_disk_) {
            std::size_t cnt = 0;
            while (cnt < entries_.size() &&
                   s_.compare(entries_[cnt].h, probe) == std::strong_ordering::less)
                cnt += 1;
            return cnt;
        }
        return btree_predecessor(s_, tree_, [&](Handle pivot) {
            return s_.compare(pivot, probe) == std::strong_ordering::less;
        });
    }

    std::size_t size() const { return red_indices_.size(); }
    std::size_t red_index_at(std::size_t pos) const { return red_indices_[pos]; }

    /// Insert the red with 1-based index `idx` (clone already resident).
    /// Takes ownership of the clone.
    void insert(std::size_t idx, Handle clone) {
        const auto it =
            std::lower_bound(red_indices_.begin(), red_indices_.end(), idx);
        if (it != red_indices_.end() && *it == idx) {
            s_.evict(clone, /*write_back=*/false);
            return;
        }
        const std::size_t pos = static_cast<std::size_t>(it - red_indices_.begin());
        red_indices_.insert(it, idx);
        if (!on_disk_) {
            entries_.insert(entries_.begin() + static_cast<std::ptrdiff_t>(pos),
                            Entry{clone});
            if (auto_spill_ && entries_.size() + 2 > budget_) spill();
            return;
        }
        rebuild_with(pos, clone);
    }

    ~BorderSet() {
        for (const Entry& e : entries_) s_.evict(e.h, /*write_back=*/false);
    }

  private:
    struct Entry {
        Handle h;
    };

    void spill() {
        const std::size_t B = s_.block_size();
        UnitWriter writer(s_, run_volume_slots(entries_.size(), 1, B));
        for (const Entry& e : entries_) writer.append(e.h);
        region_ = writer.finish();
        entries_.clear();
        tree_ = build_static_btree(s_, region_);
        on_disk_ = true;
    }

    // Stream the old region into a fresh one with the new clone merged in at
    // position `pos`, then rebuild the index tree.
    void rebuild_with(std::size_t pos, Handle clone) {
        const std::size_t B = s_.block_size();
        const std::size_t n = red_indices_.size();  // already includes the new one
        UnitWriter writer(s_, run_volume_slots(n, 1, B));
        std::size_t emitted = 0;
        if (region_.count == 0) {
            writer.append(clone);
        } else {
            for (std::size_t b = 0;
                 b < blocks_covering(region_.start, region_.count, B); ++b) {
                auto handles = load_block_sorted(s_, region_.start / B + b);
                for (Handle h : handles) {
                    if (emitted == pos) {
                        writer.append(clone);
                        emitted += 1;
                    }
                    writer.append(s_.clone(h));
                    emitted += 1;
                }
                s_.evict(std::span<const Handle>(handles), /*write_back=*/false);
            }
            if (emitted == pos) writer.append(clone);
        }
        region_ = writer.finish();
        tree_ = build_static_btree(s_, region_);
    }

    DamSession& s_;
    std::size_t budget_;
    bool on_disk_;
    bool auto_spill_ = false;
    std::vector<Entry> entries_;           // memory form, sorted by key
    std::vector<std::size_t> red_indices_; // sorted; parallel to border order
    Run region_{0, 0, 1};
    StaticBTree tree_;
};

}  // namespace

StripeAssignment ple_dfs(DamSession& s, const Run& sorted_smalls, const Run& larges,
                         PleStats* stats, BorderMode mode) {
    const std::size_t B = s.block_size();
    const std::size_t M = s.memory_size();
    const std::uint32_t w = larges.width;
    if (M < w + 2 * B) throw ParamError("ple_dfs needs M >= w + 2B");

    StaticBTree tree = build_static_btree(s, sorted_smalls);
    const std::size_t S = sorted_smalls.count;
    const std::size_t input_res = std::max<std::size_t>(w, B);
    const std::size_t budget =
        M > input_res + 2 * B + 2 ? M - input_res - 2 * B - 2 : 0;
    BorderSet borders(s, mode, budget);
    std::set<std::size_t> assigned;
    std::vector<std::size_t> preds(larges.count, 0);
    PleStats local;
    PleStats& st = stats ? *stats : local;

    auto resolve = [&](Handle lh, std::size_t i) {
        const std::size_t pos = borders.rank_below(lh);
        bool member = false;
        std::size_t pred = 0;
        if (pos == 0) {
            member = assigned.count(0) != 0;
        } else {
            const std::size_t r = borders.red_index_at(pos - 1);
            if (assigned.count(r) != 0 &&
                (r == S || (pos < borders.size() &&
                            borders.red_index_at(pos) == r + 1))) {
                member = true;
                pred = r;
            }
        }
        if (!member) {
            st.full_descents += 1;
            pred = btree_predecessor(s, tree, [&](Handle pivot) {
                return s.compare(pivot, lh) == std::strong_ordering::less;
            });
            if (pred >= 1) borders.insert(pred, clone_base(s, sorted_smalls, pred - 1));
            if (pred + 1 <= S) borders.insert(pred + 1, clone_base(s, sorted_smalls, pred));
            assigned.insert(pred);
        }
        preds[i] = pred;
    };

    if (w > B) {
        for (std::size_t i = 0; i < larges.count; ++i) {
            Handle lh = s.load_record(slot_of(larges, i, B));
            resolve(lh, i);
            s.evict(lh, /*write_back=*/false);
        }
    } else {
        const std::size_t per = records_per_block(w, B);
        for (std::size_t i = 0; i < larges.count; i += per) {
            auto handles = load_block_sorted(s, slot_of(larges, i, B) / B);
            for (std::size_t j = 0; j < handles.size(); ++j) resolve(handles[j], i + j);
            s.evict(std::span<const Handle>(handles), /*write_back=*/false);
        }
    }
    st.border_tree_on_disk = borders.on_disk();
    return finalize(std::move(preds));
}

namespace {

struct Group {
    std::vector<std::pair<Addr, std::size_t>> recs;  // (head slot, original index)
};

}  // namespace

StripeAssignment ple_bfs(DamSession& s, const Run& sorted_smalls, const Run& larges,
                         PleStats* stats) {
    const std::size_t B = s.block_size();
    const std::size_t M = s.memory_size();
    const std::uint32_t w = larges.width;
    const std::size_t S = sorted_smalls.count;
    const bool wide = w >= B;

    std::size_t F;
    if (wide) {
        if (M < w + 2 * B || B < 2)
            throw ParamError("ple_bfs wide path needs M >= w + 2B and B >= 2");
        F = ((M - w - B) / B) * B;
    } else {
        F = (M - std::min(M, 3 * B)) / (B + 1);
        if (F < 2) throw ParamError("ple_bfs packed path needs M >= 5B + 2");
    }
    if (S == 0 || larges.count == 0) {
        return finalize(std::vector<std::size_t>(larges.count, 0));
    }

    // pivot levels: level 1 is the smalls run itself; level l samples every
    // F-th record of level l-1
    std::vector<Run> levels{Run{}, sorted_smalls};
    while (levels.back().count > F) {
        const Run& src = levels.back();
        const std::size_t samples = (src.count + F - 1) / F;
        UnitWriter writer(s, run_volume_slots(samples, 1, B));
        std::size_t held_block = static_cast<std::size_t>(-1);
        std::vector<Handle> held;
        for (std::size_t g = 0; g < src.count; g += F) {
            const std::size_t blk = (src.start + g) / B;
            if (blk != held_block) {
                if (!held.empty())
                    s.evict(std::span<const Handle>(held), /*write_back=*/false);
                held = load_block_sorted(s, blk);
                held_block = blk;
            }
            for (Handle h : held)
                if (s.home_of(h) == src.start + g) writer.append(s.clone(h));
        }
        if (!held.empty()) s.evict(std::span<const Handle>(held), /*write_back=*/false);
        levels.push_back(writer.finish());
    }
    const std::size_t top = levels.size() - 1;

    PleStats local;
    PleStats& st = stats ? *stats : local;
    std::vector<std::size_t> preds(larges.count, 0);
    const std::size_t per = records_per_block(w, B);

    std::map<std::size_t, Group> groups;
    {
        Group root;
        for (std::size_t i = 0; i < larges.count; ++i)
            root.recs.emplace_back(slot_of(larges, i, B), i);
        groups.emplace(0, std::move(root));
    }

    for (std::size_t lvl = top; lvl >= 1; --lvl) {
        std::map<std::size_t, Group> next;
        const Run& prun = levels[lvl];
        for (auto& [v, group] : groups) {
            st.node_loads.emplace_back(lvl, v);

            // bring in this node's pivot slice
            const std::size_t lo = v * F;
            const std::size_t hi = std::min(lo + F, prun.count);
            std::vector<Handle> pivots;
            std::vector<Handle> extra;  // neighbours sharing a loaded block
            const std::size_t first_blk = (prun.start + lo) / B;
            const std::size_t last_blk = (prun.start + hi - 1) / B;
            for (std::size_t blk = first_blk; blk <= last_blk; ++blk) {
                for (Handle h : load_block_sorted(s, blk)) {
                    const std::size_t idx = s.home_of(h) - prun.start;
                    (idx >= lo && idx < hi ? pivots : extra).push_back(h);
                }
            }
            std::sort(pivots.begin(), pivots.end(), [&](Handle a, Handle b) {
                return s.home_of(a) < s.home_of(b);
            });

            std::map<std::size_t, std::vector<std::pair<Handle, std::size_t>>> buffers;
            auto flush_buffer = [&](std::size_t child) {
                auto& buf = buffers[child];
                if (buf.empty()) return;
                const Addr base = s.alloc(B);
                std::vector<Handle> hs;
                for (std::size_t j = 0; j < buf.size(); ++j) {
                    s.rehome(buf[j].first, base + j * w);
                    next[child].recs.emplace_back(base + j * w, buf[j].second);
                    hs.push_back(buf[j].first);
                }
                s.evict(std::span<const Handle>(hs), /*write_back=*/true);
                buf.clear();
            };

            std::size_t held_block = static_cast<std::size_t>(-1);
            std::map<Addr, Handle> held;
            for (const auto& [addr, orig] : group.recs) {
                Handle lh;
                if (wide) {
                    lh = s.load_record(addr);
                } else {
                    const std::size_t blk = addr / B;
                    if (blk != held_block) {
                        for (auto& kv : held) s.evict(kv.second, /*write_back=*/false);
                        held.clear();
                        for (Handle h : s.load_block(blk)) held[s.home_of(h)] = h;
                        held_block = blk;
                    }
                    lh = held.at(addr);
                    held.erase(addr);
                }
                std::size_t cnt = 0;
                while (cnt < pivots.size() &&
                       s.compare(pivots[cnt], lh) == std::strong_ordering::less)
                    cnt += 1;
                if (lvl == 1) {
                    preds[orig] = cnt > 0 ? lo + cnt : 0;
                    s.evict(lh, /*write_back=*/false);
                    continue;
                }
                const std::size_t child = lo + (cnt > 0 ? cnt - 1 : 0);
                if (wide) {
                    const Addr dst = s.alloc(run_volume_slots(1, w, B));
                    s.rehome(lh, dst);
                    s.evict(lh, /*write_back=*/true);
                    next[child].recs.emplace_back(dst, orig);
                } else {
                    buffers[child].emplace_back(lh, orig);
                    if (buffers[child].size() == per) flush_buffer(child);
                }
            }
            for (auto& [child, buf] : buffers)
                if (!buf.empty()) flush_buffer(child);
            for (auto& kv : held) s.evict(kv.second, /*write_back=*/false);

            s.evict(std::span<const Handle>(pivots), /*write_back=*/false);
            s.evict(std::span<const Handle>(extra), /*write_back=*/false);
        }
        if (lvl == 1) break;
        groups = std::move(next);
    }
    return finalize(std::move(preds));
}

StripeAssignment ple_auto(DamSession& s, const Run& sorted_smalls, const Run& larges,
                          std::size_t k_hint, PleChoice* choice, PleStats* stats) {
    const auto terms = bounds::ple_upper_terms(
        static_cast<double>(sorted_smalls.count),
        static_cast<double>(larges.count) * larges.width,
        static_cast<double>(larges.width), static_cast<double>(k_hint),
        static_cast<double>(s.block_size()), static_cast<double>(s.memory_size()));
    const bool use_dfs = terms.term2 < terms.term1;
    if (choice) {
        choice->used_dfs = use_dfs;
        choice->bfs_bound = terms.term1;
        choice->dfs_bound = terms.term2;
    }
    if (use_dfs) return ple_dfs(s, sorted_smalls, larges, stats, BorderMode::Auto);
    return ple_bfs(s, sorted_smalls, larges, stats);
}

}  // namespace damlab
