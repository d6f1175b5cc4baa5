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
#include "damlab/full_sort.hpp"

#include <algorithm>
#include <deque>

#include "damlab/em_sort.hpp"

namespace damlab {

namespace {

// Sequential reader over one run, one block or one wide record at a time.
class StreamReader {
  public:
    StreamReader(DamSession& s, const Run& run) : s_(s), run_(run) {}

    bool exhausted() const { return next_ >= run_.count && queue_.empty(); }
    Handle take() {
        if (queue_.empty()) refill();
        Handle h = queue_.front();
        queue_.pop_front();
        return h;
    }

  private:
    void refill() {
        const std::size_t B = s_.block_size();
        if (run_.width > B) {
            queue_.push_back(s_.load_record(slot_of(run_, next_, B)));
            next_ += 1;
            return;
        }
        auto handles = s_.load_block(slot_of(run_, next_, B) / B);
        std::sort(handles.begin(), handles.end(),
                  [&](Handle a, Handle b) { return s_.home_of(a) < s_.home_of(b); });
        next_ += handles.size();
        for (Handle h : handles) queue_.push_back(h);
    }

    DamSession& s_;
    Run run_;
    std::size_t next_ = 0;
    std::deque<Handle> queue_;
};

// Writes records back to back in slot order, flushing block-sized batches.
class MixedWriter {
  public:
    MixedWriter(DamSession& s, Addr start) : s_(s), cursor_(start) {}

    void append(Handle h) {
        s_.rehome(h, cursor_);
        cursor_ += s_.width_of(h);
        pending_.push_back(h);
        pending_volume_ += s_.width_of(h);
        if (pending_volume_ >= s_.block_size()) flush();
    }
    Addr finish() {
        flush();
        return cursor_;
    }

  private:
    void flush() {
        if (pending_.empty()) return;
        s_.evict(std::span<const Handle>(pending_), /*write_back=*/true);
        pending_.clear();
        pending_volume_ = 0;
    }

    DamSession& s_;
    Addr cursor_;
    std::vector<Handle> pending_;
    std::size_t pending_volume_ = 0;
};

}  // namespace

TwoSizedOutput two_sized_sort(DamSession& s, const Run& smalls, const Run& larges,
                              PleAlgo algo, std::size_t k_hint,
                              bool smalls_presorted) {
    const std::size_t B = s.block_size();
    const std::size_t M = s.memory_size();
    const std::uint32_t w = larges.width;
    if (smalls.width != 1) throw ParamError("smalls must have unit volume");
    if (smalls.count == 0) throw ParamError("need at least one small record");

    TwoSizedOutput out;
    auto phase = [&](std::uint64_t& counter, auto&& fn) {
        const std::uint64_t t0 = s.ledger().total_ios();
        fn();
        counter += s.ledger().total_ios() - t0;
    };

    Run sorted_smalls = smalls;
    phase(out.phases.sort_smalls, [&] {
        if (!smalls_presorted) sorted_smalls = merge_sort_records(s, smalls);
    });

    phase(out.phases.ple, [&] {
        switch (algo) {
            case PleAlgo::Dfs:
                out.assignment = ple_dfs(s, sorted_smalls, larges, &out.ple_stats);
                break;
            case PleAlgo::Bfs:
                out.assignment = ple_bfs(s, sorted_smalls, larges, &out.ple_stats);
                break;
            case PleAlgo::Auto:
                out.assignment =
                    ple_auto(s, sorted_smalls, larges,
                             k_hint ? k_hint : std::max<std::size_t>(larges.count, 1),
                             &out.choice, &out.ple_stats);
                break;
        }
    });

    const std::size_t k = out.assignment.stripe_count;
    out.stripe_sizes.assign(k, 0);
    for (std::size_t id : out.assignment.stripe_id) out.stripe_sizes[id - 1] += 1;

    // group the larges by stripe, each stripe starting at a block boundary
    std::size_t grouped_volume = 0;
    for (std::size_t n : out.stripe_sizes) grouped_volume += run_volume_slots(n, w, B);
    Run grouped{s.alloc(grouped_volume), larges.count, w};
    phase(out.phases.regroup, [&] {
        std::vector<std::size_t> filled(k, 0);
        auto stripe_slot = [&](std::size_t id) {
            Run sub = stripe_sub_run(grouped, out.stripe_sizes, id - 1, B);
            const Addr a = slot_of(sub, filled[id - 1], B);
            filled[id - 1] += 1;
            return a;
        };
        if (w > B || (k + 2) * B > M) {
            // one record at a time; always fits in memory
            for (std::size_t i = 0; i < larges.count; ++i) {
                Handle h = s.load_record(slot_of(larges, i, B));
                s.rehome(h, stripe_slot(out.assignment.stripe_id[i]));
                s.evict(h, /*write_back=*/true);
            }
        } else {
            // streamed with one output buffer per stripe
            std::vector<std::vector<Handle>> buffers(k);
            const std::size_t per = records_per_block(w, B);
            auto flush = [&](std::size_t id) {
                auto& buf = buffers[id - 1];
                if (buf.empty()) return;
                for (Handle h : buf) s.rehome(h, stripe_slot(id));
                s.evict(std::span<const Handle>(buf), /*write_back=*/true);
                buf.clear();
            };
            for (std::size_t i = 0; i < larges.count; i += per) {
                auto handles = s.load_block(slot_of(larges, i, B) / B);
                std::sort(handles.begin(), handles.end(), [&](Handle a, Handle b) {
                    return s.home_of(a) < s.home_of(b);
                });
                for (std::size_t j = 0; j < handles.size(); ++j) {
                    const std::size_t id = out.assignment.stripe_id[i + j];
                    buffers[id - 1].push_back(handles[j]);
                    if (buffers[id - 1].size() == per) flush(id);
                }
            }
            for (std::size_t id = 1; id <= k; ++id) flush(id);
        }
    });

    std::vector<Run> sorted_stripes;
    phase(out.phases.sort_stripes, [&] {
        sorted_stripes = sort_stripes(s, grouped, out.stripe_sizes);
    });

    // interleave: after small p comes the stripe whose predecessor is p
    std::vector<std::size_t> stripe_pred(k, 0);
    {
        std::vector<std::size_t> distinct = out.assignment.predecessor_index;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        stripe_pred = distinct;  // stripe id i has predecessor distinct[i-1]
    }

    const std::size_t total_volume = smalls.count + larges.count * w;
    const Addr out_start = s.alloc(total_volume);
    phase(out.phases.emit, [&] {
        MixedWriter writer(s, out_start);
        StreamReader small_reader(s, sorted_smalls);
        std::size_t next_stripe = 0;
        auto emit_stripe = [&](std::size_t idx) {
            StreamReader r(s, sorted_stripes[idx]);
            while (!r.exhausted()) writer.append(r.take());
        };
        if (next_stripe < k && stripe_pred[next_stripe] == 0) {
            emit_stripe(next_stripe);
            next_stripe += 1;
        }
        for (std::size_t p = 1; p <= sorted_smalls.count; ++p) {
            writer.append(small_reader.take());
            if (next_stripe < k && stripe_pred[next_stripe] == p) {
                emit_stripe(next_stripe);
                next_stripe += 1;
            }
        }
        writer.finish();
    });

    out.output_start = out_start;
    out.output_volume = total_volume;
    return out;
}

std::vector<Key> peek_mixed(const DamSession& s, Addr start, std::size_t volume) {
    std::vector<Key> keys;
    Addr a = start;
    const Addr end = start + volume;
    while (a < end) {
        if (!s.slot_has_head(a)) throw ContractError("gap in mixed output region");
        keys.push_back(s.peek_key(a));
        a += s.peek_width(a);
    }
    return keys;
}

}  // namespace damlab
