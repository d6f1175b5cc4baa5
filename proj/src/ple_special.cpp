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
#include "damlab/ple_special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "damlab/bounds.hpp"

namespace damlab {

namespace {

std::vector<Handle> load_block_sorted(DamSession& s, std::size_t block) {
    auto handles = s.load_block(block);
    std::sort(handles.begin(), handles.end(),
              [&](Handle a, Handle b) { return s.home_of(a) < s.home_of(b); });
    return handles;
}

// Clone one record of a sorted unit run; costs one block read.
Handle clone_unit(DamSession& s, const Run& run, std::size_t idx0) {
    const std::size_t B = s.block_size();
    auto handles = s.load_block((run.start + idx0) / B);
    Handle found = 0;
    for (Handle h : handles)
        if (s.home_of(h) == run.start + idx0) found = s.clone(h);
    s.evict(std::span<const Handle>(handles), /*write_back=*/false);
    if (found == 0) throw ContractError("missing record in unit run");
    return found;
}

// One charged probe of base[idx0] against an in-memory key.
bool base_key_below(DamSession& s, const Run& base, std::size_t idx0, Key probe) {
    const std::size_t B = s.block_size();
    auto handles = s.load_block((base.start + idx0) / B);
    bool below = false;
    for (Handle h : handles)
        if (s.home_of(h) == base.start + idx0)
            below = s.compare_key(h, probe) == std::strong_ordering::less;
    s.evict(std::span<const Handle>(handles), /*write_back=*/false);
    return below;
}

std::size_t pivot_of(const Interval& iv) { return (iv.lo + iv.hi) / 2; }

Interval apply_bit(const Interval& iv, bool above) {
    if (iv.hi - iv.lo <= 1) return iv;
    const std::size_t p = pivot_of(iv);
    return above ? Interval{p, iv.hi} : Interval{iv.lo, p};
}

}  // namespace

SampledIndex build_sampled_index(DamSession& s, const Run& sorted_base) {
    const std::size_t B = s.block_size();
    if (B < 4) throw ParamError("sampled index needs B >= 4");
    if (sorted_base.width != 1)
        throw ContractError("sampled index expects a unit-width base");
    const std::size_t N = sorted_base.count;
    if (N == 0) throw ParamError("sampled index needs a nonempty base");

    SampledIndex idx;
    idx.base = sorted_base;
    const double exponent = 1.0 / std::log2(static_cast<double>(B));
    idx.beta = static_cast<std::size_t>(
        std::ceil(std::pow(static_cast<double>(N), exponent) - 1e-9));
    if (idx.beta < 1) idx.beta = 1;
    const std::size_t n_samples = N / idx.beta;

    std::vector<Handle> pending;
    Run samples{s.alloc(run_volume_slots(n_samples, 1, B)), 0, 1};
    std::size_t held_block = static_cast<std::size_t>(-1);
    std::vector<Handle> held;
    auto flush = [&]() {
        if (pending.empty()) return;
        for (Handle h : pending) {
            s.rehome(h, samples.start + samples.count);
            samples.count += 1;
        }
        s.evict(std::span<const Handle>(pending), /*write_back=*/true);
        pending.clear();
    };
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::size_t g = (i + 1) * idx.beta - 1;
        const std::size_t blk = (sorted_base.start + g) / B;
        if (blk != held_block) {
            if (!held.empty())
                s.evict(std::span<const Handle>(held), /*write_back=*/false);
            held = s.load_block(blk);
            held_block = blk;
        }
        for (Handle h : held)
            if (s.home_of(h) == sorted_base.start + g) {
                pending.push_back(s.clone(h));
                if (pending.size() == B) flush();
            }
    }
    if (!held.empty()) s.evict(std::span<const Handle>(held), /*write_back=*/false);
    flush();
    idx.samples = samples;
    idx.sample_blocks =
        samples.count == 0 ? 0 : blocks_covering(samples.start, samples.count, B);
    idx.tree = build_static_btree(s, samples);
    return idx;
}

std::size_t query_sampled(DamSession& s, const SampledIndex& idx, Key probe,
                          std::uint64_t* reads_used) {
    const std::uint64_t before = s.ledger().reads;
    const std::size_t N = idx.base.count;
    std::size_t pos = 0;
    if (idx.samples.count > 0)
        pos = btree_predecessor(s, idx.tree, [&](Handle h) {
            return s.compare_key(h, probe) == std::strong_ordering::less;
        });
    // predecessor lies in the beta-wide base segment above sample `pos`
    std::size_t lo = pos * idx.beta;
    std::size_t hi = std::min(lo + idx.beta - 1, N);
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (base_key_below(s, idx.base, mid, probe))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (reads_used) *reads_used = s.ledger().reads - before;
    return lo;
}

TwoBTree build_2b_tree(DamSession& s, const Run& sorted_base, Interval domain,
                       std::size_t alpha, std::size_t node_budget) {
    const std::size_t B = s.block_size();
    const std::size_t n = sorted_base.count;
    if (sorted_base.width != 1)
        throw ContractError("batch tree expects a unit-width base");
    if (B >= 32) throw ParamError("batch tree fanout 2^B is unusable for B >= 32");
    if (domain.hi <= domain.lo || domain.hi > n + 1 || alpha == 0)
        throw ParamError("bad batch tree domain or depth");

    if (node_budget == 0) {
        if (const char* env = std::getenv("DAMLAB_NODE_BUDGET"))
            node_budget = static_cast<std::size_t>(std::strtoull(env, nullptr, 10));
        if (node_budget == 0) node_budget = std::size_t{1} << 20;
    }
    const std::size_t fan = std::size_t{1} << B;
    std::size_t total = 0, per = 1;
    for (std::size_t l = 0; l < alpha; ++l) {
        total += per;
        if (total > node_budget)
            throw ParamError("batch tree node budget exceeded");
        if (per > node_budget) throw ParamError("batch tree node budget exceeded");
        per *= fan;
    }

    TwoBTree tree;
    tree.base = sorted_base;
    tree.domain = domain;
    tree.alpha = alpha;
    tree.node_count = total;

    // boundary block: the extreme base keys, read once per query batch
    tree.boundary = s.alloc(B);
    {
        Handle lo_c = clone_unit(s, sorted_base, 0);
        Handle hi_c = clone_unit(s, sorted_base, n - 1);
        s.rehome(lo_c, tree.boundary);
        s.rehome(hi_c, tree.boundary + 1);
        const Handle both[2] = {lo_c, hi_c};
        s.evict(std::span<const Handle>(both, 2), /*write_back=*/true);
    }

    per = 1;
    for (std::size_t l = 0; l < alpha; ++l) {
        tree.level_start.push_back(s.alloc(per * B));
        for (std::size_t m = 0; m < per; ++m) {
            std::vector<Interval> ivs(B, domain);
            for (std::size_t d = 0; d + 1 <= l; ++d) {
                const std::size_t mask = (m >> ((l - 1 - d) * B)) & (fan - 1);
                for (std::size_t t = 0; t < B; ++t)
                    ivs[t] = apply_bit(ivs[t], ((mask >> t) & 1) != 0);
            }
            std::vector<Handle> clones;
            for (std::size_t t = 0; t < B; ++t) {
                std::size_t p = ivs[t].hi - ivs[t].lo <= 1
                                    ? std::min(std::max<std::size_t>(ivs[t].lo, 1), n)
                                    : pivot_of(ivs[t]);
                clones.push_back(clone_unit(s, sorted_base, p - 1));
            }
            const Addr addr = tree.level_start[l] + m * B;
            for (std::size_t t = 0; t < B; ++t) s.rehome(clones[t], addr + t);
            s.evict(std::span<const Handle>(clones), /*write_back=*/true);
        }
        per *= fan;
    }
    return tree;
}

std::vector<Interval> query_2b(DamSession& s, const TwoBTree& tree,
                               std::span<const Key> probes,
                               BatchQueryStats* stats) {
    const std::size_t B = s.block_size();
    if (probes.empty() || probes.size() > B)
        throw ParamError("batch query takes between 1 and B probes");
    const std::uint64_t before = s.ledger().reads;

    {
        auto handles = s.load_block(tree.boundary / B);
        s.evict(std::span<const Handle>(handles), /*write_back=*/false);
    }

    std::vector<Interval> ivs(B, tree.domain);
    const std::size_t fan = std::size_t{1} << B;
    std::size_t id = 0;
    for (std::size_t l = 0; l < tree.alpha; ++l) {
        const Addr addr = tree.level_start[l] + id * B;
        auto handles = load_block_sorted(s, addr / B);
        std::size_t mask = 0;
        for (std::size_t t = 0; t < B; ++t) {
            const Key pk = probes[std::min(t, probes.size() - 1)];
            bool above = false;
            if (ivs[t].hi - ivs[t].lo > 1)
                above = s.compare_key(handles[t], pk) == std::strong_ordering::less;
            if (above) mask |= std::size_t{1} << t;
            ivs[t] = apply_bit(ivs[t], above);
        }
        s.evict(std::span<const Handle>(handles), /*write_back=*/false);
        id = id * fan + mask;
        if (stats) {
            std::size_t widest = 0;
            std::vector<std::size_t> level;
            for (std::size_t t = 0; t < probes.size(); ++t) {
                widest = std::max(widest, ivs[t].hi - ivs[t].lo);
                level.push_back(ivs[t].hi - ivs[t].lo);
            }
            stats->max_len_per_level.push_back(widest);
            stats->widths.push_back(std::move(level));
        }
    }
    if (stats) stats->reads += s.ledger().reads - before;
    ivs.resize(probes.size());
    return ivs;
}

namespace {

struct KeyRec {
    Addr addr;
    std::size_t orig;
};

// Buffered writer for unit key copies that reports where each one landed.
class KeyWriter {
  public:
    KeyWriter(DamSession& s, std::size_t capacity)
        : s_(s), out_{s.alloc(run_volume_slots(capacity, 1, s.block_size())), 0, 1} {}

    void append(Handle h, std::size_t orig, std::vector<KeyRec>& recs) {
        pending_.push_back(h);
        origs_.push_back(orig);
        if (pending_.size() == s_.block_size()) flush(recs);
    }
    void finish(std::vector<KeyRec>& recs) { flush(recs); }

  private:
    void flush(std::vector<KeyRec>& recs) {
        if (pending_.empty()) return;
        for (std::size_t j = 0; j < pending_.size(); ++j) {
            const Addr a = out_.start + out_.count;
            s_.rehome(pending_[j], a);
            recs.push_back(KeyRec{a, origs_[j]});
            out_.count += 1;
        }
        s_.evict(std::span<const Handle>(pending_), /*write_back=*/true);
        pending_.clear();
        origs_.clear();
    }

    DamSession& s_;
    Run out_;
    std::vector<Handle> pending_;
    std::vector<std::size_t> origs_;
};

using IvKey = std::pair<std::size_t, std::size_t>;

}  // namespace

KkSortResult kk_sort_2b(DamSession& s, const Run& sorted_smalls, const Run& larges,
                        std::optional<double> j_override, std::size_t node_budget) {
    const std::size_t B = s.block_size();
    const std::size_t M = s.memory_size();
    const std::uint32_t w = larges.width;
    const std::size_t n = sorted_smalls.count;
    const std::size_t kc = larges.count;
    if (kc == 0 || n == 0) throw ParamError("swipe sort needs records on both sides");

    KkSortResult out;
    double j;
    if (j_override) {
        j = *j_override;
    } else {
        const double inner = bounds::logc(static_cast<double>(M) / B,
                                          static_cast<double>(kc) / B);
        j = (bounds::log2c(inner) - bounds::log2c(static_cast<double>(B))) /
            (static_cast<double>(B) - 1.0);
    }
    if (j < 1.0)
        throw ParamError("batch parameter j < 1: instance is below the k0 "
                         "threshold for swipe passes");
    out.j_used = j;
    const std::size_t alpha =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(j - 1e-9)));
    const double l2k = std::log2(static_cast<double>(kc));
    long g = static_cast<long>(std::ceil((l2k - j) / j - 1e-9));
    if (g < 0) g = 0;

    const std::uint64_t total_before = s.ledger().total_ios();
    std::uint64_t large_acc = 0;
    auto large_delta = [&](auto&& fn) {
        const std::uint64_t t0 = s.ledger().total_ios();
        fn();
        large_acc += s.ledger().total_ios() - t0;
    };

    // extract the large keys into unit-width short blocks
    std::map<IvKey, std::vector<KeyRec>> groups;
    {
        std::vector<KeyRec> recs;
        KeyWriter writer(s, kc);
        if (w > B) {
            for (std::size_t i = 0; i < kc; ++i) {
                Handle lh = 0;
                large_delta([&] { lh = s.load_record(slot_of(larges, i, B)); });
                writer.append(s.make_record(s.key_of(lh), 1), i, recs);
                s.evict(lh, /*write_back=*/false);
            }
        } else {
            const std::size_t per = records_per_block(w, B);
            for (std::size_t i = 0; i < kc; i += per) {
                std::vector<Handle> handles;
                large_delta(
                    [&] { handles = load_block_sorted(s, slot_of(larges, i, B) / B); });
                for (std::size_t j2 = 0; j2 < handles.size(); ++j2)
                    writer.append(s.make_record(s.key_of(handles[j2]), 1), i + j2,
                                  recs);
                s.evict(std::span<const Handle>(handles), /*write_back=*/false);
            }
        }
        writer.finish(recs);
        groups.emplace(IvKey{0, n + 1}, std::move(recs));
    }

    // g swipe passes, each refining every unresolved interval by alpha bits
    for (long pass = 0; pass < g; ++pass) {
        out.swipes += 1;
        std::map<IvKey, std::vector<KeyRec>> next;
        for (auto& [iv, recs] : groups) {
            if (iv.second - iv.first <= 1) {
                auto& dst = next[iv];
                dst.insert(dst.end(), recs.begin(), recs.end());
                continue;
            }
            TwoBTree tree = build_2b_tree(s, sorted_smalls,
                                          Interval{iv.first, iv.second}, alpha,
                                          node_budget);
            std::map<IvKey, std::vector<std::pair<Handle, std::size_t>>> buffers;
            auto flush_child = [&](const IvKey& child) {
                auto& buf = buffers[child];
                if (buf.empty()) return;
                const Addr base = s.alloc(B);
                std::vector<Handle> hs;
                for (std::size_t j2 = 0; j2 < buf.size(); ++j2) {
                    s.rehome(buf[j2].first, base + j2);
                    next[child].push_back(KeyRec{base + j2, buf[j2].second});
                    hs.push_back(buf[j2].first);
                }
                s.evict(std::span<const Handle>(hs), /*write_back=*/true);
                buf.clear();
            };

            std::size_t i = 0;
            while (i < recs.size()) {
                const std::size_t blk = recs[i].addr / B;
                std::size_t end = i;
                while (end < recs.size() && recs[end].addr / B == blk) end += 1;
                auto handles = s.load_block(blk);
                std::map<Addr, Handle> by_home;
                for (Handle h : handles) by_home[s.home_of(h)] = h;
                std::vector<Key> probes;
                for (std::size_t r = i; r < end; ++r)
                    probes.push_back(s.key_of(by_home.at(recs[r].addr)));
                const auto refined = query_2b(s, tree, probes, nullptr);
                for (std::size_t r = i; r < end; ++r) {
                    const IvKey child{refined[r - i].lo, refined[r - i].hi};
                    buffers[child].emplace_back(by_home.at(recs[r].addr),
                                                recs[r].orig);
                    if (buffers[child].size() == B) flush_child(child);
                }
                i = end;
            }
            for (auto& [child, buf] : buffers)
                if (!buf.empty()) flush_child(child);
        }
        groups = std::move(next);
    }

    // emission merge-scan: the last bits are resolved with free comparisons
    Run sorted{s.alloc(run_volume_slots(kc, w, B)), 0, w};
    std::vector<Handle> pending;
    const std::size_t per = records_per_block(w, B);
    auto emit = [&](Handle lh) {
        large_delta([&] {
            if (w > B) {
                s.rehome(lh, slot_of(sorted, sorted.count, B));
                s.evict(lh, /*write_back=*/true);
                sorted.count += 1;
                return;
            }
            pending.push_back(lh);
            if (pending.size() == per) {
                for (Handle h : pending) {
                    s.rehome(h, slot_of(sorted, sorted.count, B));
                    sorted.count += 1;
                }
                s.evict(std::span<const Handle>(pending), /*write_back=*/true);
                pending.clear();
            }
        });
    };

    std::vector<std::size_t> preds(kc, 0);
    for (auto& [iv, recs] : groups) {
        // bring in the candidate predecessors for this interval
        const std::size_t c0 = iv.first;
        const std::size_t c1 = std::min(iv.second - 1, n);
        std::vector<Handle> smalls_res;
        std::vector<std::pair<std::size_t, Handle>> candidates;
        if (c1 > c0) {
            const std::size_t fb = (sorted_smalls.start + c0) / B;
            const std::size_t lb = (sorted_smalls.start + c1 - 1) / B;
            for (std::size_t blk = fb; blk <= lb; ++blk)
                for (Handle h : s.load_block(blk)) {
                    smalls_res.push_back(h);
                    const std::size_t idx = s.home_of(h) - sorted_smalls.start;
                    if (idx >= c0 && idx < c1) candidates.emplace_back(idx, h);
                }
        }
        std::vector<std::pair<Handle, std::size_t>> ls;
        for (const KeyRec& rec : recs) {
            Handle lh = 0;
            large_delta([&] { lh = s.load_record(slot_of(larges, rec.orig, B)); });
            ls.emplace_back(lh, rec.orig);
        }
        for (auto& [lh, orig] : ls) {
            std::size_t cnt = 0;
            for (auto& [idx, sh] : candidates)
                if (s.compare(sh, lh) == std::strong_ordering::less) cnt += 1;
            preds[orig] = c0 + cnt;
        }
        std::sort(ls.begin(), ls.end(), [&](const auto& a, const auto& b) {
            return s.key_of(a.first) < s.key_of(b.first);
        });
        s.evict(std::span<const Handle>(smalls_res), /*write_back=*/false);
        for (auto& [lh, orig] : ls) emit(lh);
    }
    large_delta([&] {
        if (!pending.empty()) {
            for (Handle h : pending) {
                s.rehome(h, slot_of(sorted, sorted.count, B));
                sorted.count += 1;
            }
            s.evict(std::span<const Handle>(pending), /*write_back=*/true);
            pending.clear();
        }
    });

    out.sorted_larges = sorted;
    out.assignment = assignment_from_preds(std::move(preds));
    out.large_record_ios = large_acc;
    out.short_block_ios = s.ledger().total_ios() - total_before - large_acc;
    return out;
}

}  // namespace damlab
