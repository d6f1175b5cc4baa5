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
#include "damlab/em_sort.hpp"

#include <algorithm>
#include <deque>

namespace damlab {

namespace {

// Streams one sorted run, keeping at most one block (packed widths) or one
// record (wide widths) resident at a time.
class RunReader {
  public:
    RunReader(DamSession& s, const Run& run) : s_(s), run_(run) {}

    bool exhausted() const { return next_ >= run_.count && queue_.empty(); }

    Handle head() {
        if (queue_.empty()) refill();
        return queue_.front();
    }
    Handle take() {
        Handle h = head();
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
        const std::size_t block = slot_of(run_, next_, B) / B;
        auto handles = s_.load_block(block);
        const std::size_t per = records_per_block(run_.width, B);
        next_ = std::min(run_.count, ((block * B - run_.start) / B + 1) * per);
        for (Handle h : handles) queue_.push_back(h);
    }

    DamSession& s_;
    Run run_;
    std::size_t next_ = 0;
    std::deque<Handle> queue_;
};

class RunWriter {
  public:
    RunWriter(DamSession& s, std::uint32_t width, std::size_t capacity)
        : s_(s), out_{s.alloc(run_volume_slots(capacity, width, s.block_size())),
                      0, width} {}

    void append(Handle h) {
        const std::size_t B = s_.block_size();
        if (out_.width > B) {
            s_.rehome(h, slot_of(out_, out_.count, B));
            s_.evict(h, /*write_back=*/true);
            out_.count += 1;
            return;
        }
        pending_.push_back(h);
        if (pending_.size() == records_per_block(out_.width, B)) flush();
    }

    Run finish() {
        flush();
        return out_;
    }

  private:
    void flush() {
        if (pending_.empty()) return;
        const std::size_t B = s_.block_size();
        for (Handle h : pending_) {
            s_.rehome(h, slot_of(out_, out_.count, B));
            out_.count += 1;
        }
        s_.evict(std::span<const Handle>(pending_), /*write_back=*/true);
        pending_.clear();
    }

    DamSession& s_;
    Run out_;
    std::vector<Handle> pending_;
};

// Load up to `cap` records of [first, first+n), sort them in memory for free,
// and write them out as one sorted run.
Run form_run(DamSession& s, const Run& input, std::size_t first, std::size_t n) {
    const std::size_t B = s.block_size();
    std::vector<Handle> handles;
    if (input.width > B) {
        for (std::size_t i = 0; i < n; ++i)
            handles.push_back(s.load_record(slot_of(input, first + i, B)));
    } else {
        const std::size_t per = records_per_block(input.width, B);
        for (std::size_t i = 0; i < n; i += per) {
            const std::size_t block = slot_of(input, first + i, B) / B;
            for (Handle h : s.load_block(block)) handles.push_back(h);
        }
    }
    std::sort(handles.begin(), handles.end(),
              [&](Handle x, Handle y) { return s.key_of(x) < s.key_of(y); });
    Run out{s.alloc(run_volume_slots(n, input.width, B)), 0, input.width};
    for (Handle h : handles) {
        s.rehome(h, slot_of(out, out.count, B));
        out.count += 1;
    }
    s.evict(std::span<const Handle>(handles), /*write_back=*/true);
    return out;
}

Run merge_group(DamSession& s, std::span<const Run> runs) {
    std::size_t total = 0;
    for (const Run& r : runs) total += r.count;
    std::vector<RunReader> readers;
    readers.reserve(runs.size());
    for (const Run& r : runs) readers.emplace_back(s, r);
    RunWriter writer(s, runs.front().width, total);
    for (std::size_t emitted = 0; emitted < total; ++emitted) {
        std::size_t best = runs.size();
        for (std::size_t i = 0; i < readers.size(); ++i) {
            if (readers[i].exhausted()) continue;
            if (best == runs.size() ||
                s.key_of(readers[i].head()) < s.key_of(readers[best].head()))
                best = i;
        }
        writer.append(readers[best].take());
    }
    return writer.finish();
}

}  // namespace

Run merge_sort_records(DamSession& s, const Run& input) {
    const std::size_t B = s.block_size();
    const std::size_t M = s.memory_size();
    std::size_t fanout, run_capacity;
    if (input.width > B) {
        if (input.width > M / 2) throw ParamError("record width exceeds M/2");
        fanout = M / input.width;
        if (fanout < 2) throw ParamError("need floor(M/w) >= 2 to merge");
        run_capacity = fanout;
    } else {
        fanout = M / B - 1;
        if (fanout < 2) throw ParamError("mergesort needs M >= 3B");
        run_capacity = (M / B) * records_per_block(input.width, B);
    }
    if (input.count == 0) return Run{s.alloc(0), 0, input.width};

    std::vector<Run> runs;
    for (std::size_t first = 0; first < input.count; first += run_capacity)
        runs.push_back(
            form_run(s, input, first, std::min(run_capacity, input.count - first)));

    while (runs.size() > 1) {
        std::vector<Run> next;
        for (std::size_t i = 0; i < runs.size(); i += fanout) {
            const std::size_t n = std::min(fanout, runs.size() - i);
            if (n == 1) {
                next.push_back(runs[i]);
                continue;
            }
            next.push_back(merge_group(s, std::span<const Run>(&runs[i], n)));
        }
        runs = std::move(next);
    }
    return runs.front();
}

Run merge_sort_small(DamSession& s, const Run& input) {
    if (input.width != 1) throw ContractError("merge_sort_small expects unit records");
    return merge_sort_records(s, input);
}

Run merge_sort_large(DamSession& s, const Run& input) {
    if (input.width < s.block_size())
        throw ParamError("merge_sort_large expects w >= B");
    return merge_sort_records(s, input);
}

Run stripe_sub_run(const Run& grouped, std::span<const std::size_t> sizes,
                   std::size_t i, std::size_t B) {
    Addr start = grouped.start;
    for (std::size_t j = 0; j < i; ++j)
        start += run_volume_slots(sizes[j], grouped.width, B);
    return Run{start, sizes[i], grouped.width};
}

std::vector<Run> sort_stripes(DamSession& s, const Run& grouped,
                              std::span<const std::size_t> stripe_sizes) {
    std::size_t total = 0;
    for (std::size_t n : stripe_sizes) total += n;
    if (total != grouped.count)
        throw ContractError("stripe sizes disagree with grouped run");
    std::vector<Run> out;
    out.reserve(stripe_sizes.size());
    for (std::size_t i = 0; i < stripe_sizes.size(); ++i)
        out.push_back(merge_sort_records(
            s, stripe_sub_run(grouped, stripe_sizes, i, s.block_size())));
    return out;
}

}  // namespace damlab
