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
#include "damlab/ram_sort.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "damlab/errors.hpp"

namespace damlab {

namespace {

// Bottom-up mergesort with a counted comparator; deterministic comparison
// counts, unlike std::sort.
template <typename Less>
void counted_mergesort(std::vector<Key>& v, Less less) {
    std::vector<Key> tmp(v.size());
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, v.size());
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, o = lo;
            while (i < mid && j < hi) tmp[o++] = less(v[j], v[i]) ? v[j++] : v[i++];
            while (i < mid) tmp[o++] = v[i++];
            while (j < hi) tmp[o++] = v[j++];
            std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
        }
    }
}

void check_distinct(std::span<const Key> reds, std::span<const Key> blues) {
    std::set<Key> seen;
    for (Key k : reds)
        if (!seen.insert(k).second) throw ContractError("duplicate key in input");
    for (Key k : blues)
        if (!seen.insert(k).second) throw ContractError("duplicate key in input");
}

struct Border {
    Key key;
    std::size_t red_index;  // 1-based position in sorted reds
};

}  // namespace

PricedSortResult priced_sort(std::span<const Key> reds, std::span<const Key> blues,
                             const PriceTriple& prices) {
    if (!(prices.a <= prices.b && prices.b <= prices.c))
        throw ParamError("priced_sort requires prices a <= b <= c");
    check_distinct(reds, blues);

    PricedSortResult out;
    RamLedger& led = out.ledger;

    // step 1: sort reds with cost-a comparisons
    std::vector<Key> red_sorted(reds.begin(), reds.end());
    counted_mergesort(red_sorted, [&](Key x, Key y) {
        led.count_a += 1;
        return x < y;
    });
    const std::size_t n_red = red_sorted.size();

    // step 2: route blues; only first-in-stripe blues descend the red tree
    std::vector<Border> borders;  // sorted by key
    std::map<std::size_t, std::vector<Key>> buckets;  // predecessor index -> blues

    auto blue_red_less = [&](Key blue, Key red) {
        led.count_b += 1;
        return blue < red;
    };

    for (Key blue : blues) {
        // binary search among borders (the dynamic tree over <= 2k reds)
        std::size_t lo = 0, hi = borders.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (blue_red_less(blue, borders[mid].key))
                hi = mid;
            else
                lo = mid + 1;
        }
        // borders[lo-1] is the largest border below blue (if any)
        bool member = false;
        std::size_t pred = 0;
        if (lo == 0) {
            if (buckets.count(0)) {
                member = true;
                pred = 0;
            }
        } else {
            const std::size_t r = borders[lo - 1].red_index;
            if (buckets.count(r) &&
                (r == n_red || (lo < borders.size() && borders[lo].red_index == r + 1))) {
                member = true;
                pred = r;
            }
        }
        if (!member) {
            // new stripe: full descent of the static red tree
            out.red_tree_descents += 1;
            std::size_t rlo = 0, rhi = n_red;
            while (rlo < rhi) {
                const std::size_t mid = (rlo + rhi) / 2;
                if (blue_red_less(blue, red_sorted[mid]))
                    rhi = mid;
                else
                    rlo = mid + 1;
            }
            pred = rlo;  // count of reds below blue
            // insert the sandwiching borders
            auto add_border = [&](std::size_t idx) {
                if (idx == 0 || idx > n_red) return;
                const Key key = red_sorted[idx - 1];
                auto it = std::lower_bound(
                    borders.begin(), borders.end(), key,
                    [](const Border& b, Key k) { return b.key < k; });
                if (it == borders.end() || it->key != key)
                    borders.insert(it, Border{key, idx});
            };
            add_border(pred);
            add_border(pred + 1);
        }
        buckets[pred].push_back(blue);
    }
    out.stripes_discovered = buckets.size();

    // step 3: sort each blue stripe with cost-c comparisons
    for (auto& [pred, bucket] : buckets)
        counted_mergesort(bucket, [&](Key x, Key y) {
            led.count_c += 1;
            return x < y;
        });

    // emit: interleave without further comparisons
    out.sorted.reserve(reds.size() + blues.size());
    auto bucket_it = buckets.begin();
    if (bucket_it != buckets.end() && bucket_it->first == 0) {
        out.sorted.insert(out.sorted.end(), bucket_it->second.begin(),
                          bucket_it->second.end());
        ++bucket_it;
    }
    for (std::size_t i = 1; i <= n_red; ++i) {
        out.sorted.push_back(red_sorted[i - 1]);
        if (bucket_it != buckets.end() && bucket_it->first == i) {
            out.sorted.insert(out.sorted.end(), bucket_it->second.begin(),
                              bucket_it->second.end());
            ++bucket_it;
        }
    }
    return out;
}

PricedSortResult naive_priced_sort(std::span<const Key> reds, std::span<const Key> blues,
                                   const PriceTriple& prices) {
    (void)prices;
    check_distinct(reds, blues);
    PricedSortResult out;
    std::set<Key> red_set(reds.begin(), reds.end());
    std::vector<Key> all(reds.begin(), reds.end());
    all.insert(all.end(), blues.begin(), blues.end());
    counted_mergesort(all, [&](Key x, Key y) {
        const bool xr = red_set.count(x) != 0;
        const bool yr = red_set.count(y) != 0;
        if (xr && yr)
            out.ledger.count_a += 1;
        else if (!xr && !yr)
            out.ledger.count_c += 1;
        else
            out.ledger.count_b += 1;
        return x < y;
    });
    out.sorted = std::move(all);
    return out;
}

}  // namespace damlab
