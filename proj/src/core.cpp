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
#include "damlab/core.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace damlab {

namespace {

// mt19937_64 is fully specified by the standard; std::uniform_int_distribution
// is not, so ranges are drawn by rejection for cross-platform determinism.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[draw(rng, i)]);
}

std::vector<std::size_t> random_composition(std::size_t total, std::size_t parts,
                                            std::mt19937_64& rng) {
    // near-uniform: start with one per part, spread the rest randomly
    std::vector<std::size_t> sizes(parts, 1);
    for (std::size_t r = 0; r < total - parts; ++r) sizes[draw(rng, parts)] += 1;
    return sizes;
}

std::vector<std::size_t> choose_gaps(std::size_t n_gaps, std::size_t k,
                                     std::mt19937_64& rng) {
    std::vector<std::size_t> gaps(n_gaps);
    for (std::size_t i = 0; i < n_gaps; ++i) gaps[i] = i + 1;  // gap g sits before small g
    for (std::size_t i = 0; i < k; ++i) std::swap(gaps[i], gaps[i + draw(rng, n_gaps - i)]);
    gaps.resize(k);
    std::sort(gaps.begin(), gaps.end());
    return gaps;
}

struct BuiltKeys {
    std::vector<Key> small_keys_sorted;
    std::vector<Key> large_keys_sorted;
};

// Lay out the sorted label sequence (smalls at positions 0..S-1 with the
// chosen stripes inserted in their gaps) and assign strictly increasing keys.
BuiltKeys assign_keys(std::size_t S, const std::vector<std::size_t>& gaps,
                      const std::vector<std::size_t>& sizes, std::mt19937_64& rng,
                      bool sentinels) {
    BuiltKeys out;
    Key next = 0;
    auto fresh = [&]() {
        next += 1 + draw(rng, 1u << 16);
        return next;
    };
    std::size_t gi = 0;
    for (std::size_t i = 0; i < S; ++i) {
        if (sentinels && i == 0) {
            out.small_keys_sorted.push_back(0);
        } else if (sentinels && i == S - 1) {
            out.small_keys_sorted.push_back(std::numeric_limits<Key>::max());
        } else {
            out.small_keys_sorted.push_back(fresh());
        }
        while (gi < gaps.size() && gaps[gi] == i + 1) {
            for (std::size_t j = 0; j < sizes[gi]; ++j)
                out.large_keys_sorted.push_back(fresh());
            ++gi;
        }
    }
    return out;
}

}  // namespace

std::vector<Key> Instance::sorted_smalls() const {
    std::vector<Key> s = smalls;
    std::sort(s.begin(), s.end());
    return s;
}

std::vector<Key> Instance::all_keys_sorted() const {
    std::vector<Key> all = smalls;
    all.insert(all.end(), larges.begin(), larges.end());
    std::sort(all.begin(), all.end());
    return all;
}

Instance gen_instance(std::size_t S, std::size_t large_count, std::uint32_t w,
                      std::size_t k,
                      const std::optional<std::vector<std::size_t>>& stripe_sizes,
                      std::uint64_t seed) {
    if (w < 1) throw ParamError("width must be >= 1");
    if (k < 1 || k > large_count) throw ParamError("need 1 <= k <= large_count");
    if (S < 2 || k > S - 1) throw ParamError("need k <= S - 1");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> sizes;
    if (stripe_sizes) {
        sizes = *stripe_sizes;
        if (sizes.size() != k) throw ParamError("stripe_sizes length must equal k");
        std::size_t sum = 0;
        for (std::size_t s : sizes) {
            if (s == 0) throw ParamError("stripe sizes must be positive");
            sum += s;
        }
        if (sum != large_count) throw ParamError("stripe_sizes must sum to large_count");
    } else {
        sizes = random_composition(large_count, k, rng);
    }
    const auto gaps = choose_gaps(S - 1, k, rng);
    BuiltKeys built = assign_keys(S, gaps, sizes, rng, /*sentinels=*/false);

    Instance inst;
    inst.w = w;
    inst.k = k;
    inst.stripe_sizes = sizes;
    inst.seed = seed;
    inst.smalls = std::move(built.small_keys_sorted);
    inst.larges = std::move(built.large_keys_sorted);
    shuffle_vec(inst.smalls, rng);
    shuffle_vec(inst.larges, rng);
    return inst;
}

std::pair<std::size_t, std::vector<std::size_t>>
stripe_profile(std::span<const Labeled> sorted_records) {
    for (std::size_t i = 1; i < sorted_records.size(); ++i)
        if (sorted_records[i - 1].key >= sorted_records[i].key)
            throw ContractError("stripe_profile requires strictly ascending input");
    std::vector<std::size_t> sizes;
    for (const auto& r : sorted_records) {
        if (r.cls == SizeClass::Large) {
            if (sizes.empty()) sizes.push_back(0);
            sizes.back() += 1;
        } else if (!sizes.empty() && sizes.back() != 0) {
            sizes.push_back(0);
        }
    }
    if (!sizes.empty() && sizes.back() == 0) sizes.pop_back();
    // an interior small between runs may have pushed a 0 marker; strip them
    std::erase(sizes, std::size_t{0});
    return {sizes.size(), sizes};
}

StripeAssignment brute_force_predecessors(std::span<const Key> sorted_smalls,
                                          std::span<const Key> larges) {
    for (std::size_t i = 1; i < sorted_smalls.size(); ++i)
        if (sorted_smalls[i - 1] >= sorted_smalls[i])
            throw ContractError("brute_force_predecessors requires sorted smalls");
    std::vector<std::size_t> preds(larges.size());
    for (std::size_t i = 0; i < larges.size(); ++i) {
        const auto it =
            std::lower_bound(sorted_smalls.begin(), sorted_smalls.end(), larges[i]);
        preds[i] = static_cast<std::size_t>(it - sorted_smalls.begin());
    }
    return assignment_from_preds(std::move(preds));
}

StripeAssignment assignment_from_preds(std::vector<std::size_t> preds) {
    StripeAssignment a;
    a.predecessor_index = std::move(preds);
    // stripe ids: rank of each distinct predecessor index, ascending
    std::vector<std::size_t> distinct = a.predecessor_index;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    a.stripe_count = distinct.size();
    a.stripe_id.resize(a.predecessor_index.size());
    for (std::size_t i = 0; i < a.predecessor_index.size(); ++i) {
        const auto it = std::lower_bound(distinct.begin(), distinct.end(),
                                         a.predecessor_index[i]);
        a.stripe_id[i] = static_cast<std::size_t>(it - distinct.begin()) + 1;
    }
    return a;
}

Instance gen_subproblem(SubproblemKind kind, const SubproblemParams& p) {
    std::mt19937_64 rng(p.seed ^ 0x9e3779b97f4a7c15ull);
    std::size_t S, large_count, k = p.k;
    std::vector<std::size_t> sizes;
    if (k < 1) throw ParamError("subproblem needs k >= 1");
    switch (kind) {
        case SubproblemKind::SK:
            S = p.small_count;
            if (S < k + 1) throw ParamError("S-k needs S >= k + 1");
            large_count = k;
            sizes.assign(k, 1);
            break;
        case SubproblemKind::KKTilde:
            S = k + 1;
            large_count = p.large_count;
            if (large_count < k) throw ParamError("k-k~ needs large_count >= k");
            sizes = random_composition(large_count, k, rng);
            break;
        case SubproblemKind::KK:
            S = k + 1;
            large_count = k;
            sizes.assign(k, 1);
            break;
        default:
            throw ParamError("unknown subproblem kind");
    }
    std::vector<std::size_t> gaps;
    if (kind == SubproblemKind::SK) {
        gaps = choose_gaps(S - 1, k, rng);
    } else {
        for (std::size_t g = 1; g <= k; ++g) gaps.push_back(g);  // every gap occupied
    }
    BuiltKeys built = assign_keys(S, gaps, sizes, rng, /*sentinels=*/true);
    Instance inst;
    inst.w = p.w;
    inst.k = k;
    inst.stripe_sizes = sizes;
    inst.seed = p.seed;
    inst.smalls = std::move(built.small_keys_sorted);  // stays sorted: PLE contract
    inst.smalls_sorted = true;
    inst.larges = std::move(built.large_keys_sorted);
    shuffle_vec(inst.larges, rng);
    return inst;
}

void write_instance(const Instance& inst, std::ostream& os) {
    os << "DAMLAB1 S=" << inst.small_count() << " LCOUNT=" << inst.large_count()
       << " W=" << inst.w << " K=" << inst.k << " SEED=" << inst.seed;
    if (inst.smalls_sorted) os << " PRESORTED";
    os << '\n';
    for (Key s : inst.smalls) os << "S " << s << '\n';
    for (Key l : inst.larges) os << "L " << l << '\n';
}

Instance read_instance(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw IoError("empty instance file");
    std::istringstream hs(header);
    std::string magic;
    hs >> magic;
    if (magic != "DAMLAB1") throw IoError("bad magic in instance header");
    Instance inst;
    std::size_t S = 0, lcount = 0;
    std::string field;
    while (hs >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            if (field == "PRESORTED") {
                inst.smalls_sorted = true;
                continue;
            }
            if (field == "SORTED") continue;
            throw IoError("malformed header field: " + field);
        }
        const std::string name = field.substr(0, eq);
        const std::uint64_t value = std::stoull(field.substr(eq + 1));
        if (name == "S") S = value;
        else if (name == "LCOUNT") lcount = value;
        else if (name == "W") inst.w = static_cast<std::uint32_t>(value);
        else if (name == "K") inst.k = value;
        else if (name == "SEED") inst.seed = value;
        else throw IoError("unknown header field: " + name);
    }
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        Key key;
        if (!(ls >> tag >> key) || (tag != "S" && tag != "L"))
            throw IoError("malformed record line: " + line);
        (tag == "S" ? inst.smalls : inst.larges).push_back(key);
    }
    if (inst.small_count() != S || inst.large_count() != lcount)
        throw IoError("record counts disagree with header");
    // recover ground-truth stripe sizes from the keys themselves
    const auto assign = brute_force_predecessors(inst.sorted_smalls(), inst.larges);
    if (assign.stripe_count != inst.k)
        throw IoError("header K disagrees with key structure");
    std::vector<std::size_t> sizes(assign.stripe_count, 0);
    for (std::size_t id : assign.stripe_id) sizes[id - 1] += 1;
    inst.stripe_sizes = std::move(sizes);
    return inst;
}

void write_sorted_dump(std::span<const Labeled> sorted, const Instance& inst,
                       std::ostream& os) {
    os << "DAMLAB1 S=" << inst.small_count() << " LCOUNT=" << inst.large_count()
       << " W=" << inst.w << " K=" << inst.k << " SEED=" << inst.seed << " SORTED\n";
    for (const auto& r : sorted)
        os << (r.cls == SizeClass::Small ? "S " : "L ") << r.key << '\n';
}

std::size_t records_per_block(std::uint32_t w, std::size_t B) {
    return w <= B ? B / w : 1;
}

std::size_t record_stride_blocks(std::uint32_t w, std::size_t B) {
    return w <= B ? 1 : (w + B - 1) / B;
}

Addr slot_of(const Run& run, std::size_t index, std::size_t B) {
    const std::uint32_t w = run.width;
    if (w <= B) {
        const std::size_t per = B / w;
        return run.start + (index / per) * B + (index % per) * w;
    }
    return run.start + index * record_stride_blocks(w, B) * B;
}

std::size_t run_volume_slots(std::size_t count, std::uint32_t w, std::size_t B) {
    if (w <= B) {
        const std::size_t per = B / w;
        return ((count + per - 1) / per) * B;
    }
    return count * record_stride_blocks(w, B) * B;
}

Run materialize(DamSession& s, std::span<const Key> keys, std::uint32_t w) {
    Run run;
    run.width = w;
    run.count = keys.size();
    run.start = s.alloc(run_volume_slots(keys.size(), w, s.block_size()));
    for (std::size_t i = 0; i < keys.size(); ++i)
        s.place(slot_of(run, i, s.block_size()), keys[i], w);
    return run;
}

std::vector<Key> peek_run(const DamSession& s, const Run& run) {
    std::vector<Key> out;
    out.reserve(run.count);
    for (std::size_t i = 0; i < run.count; ++i)
        out.push_back(s.peek_key(slot_of(run, i, s.block_size())));
    return out;
}

}  // namespace damlab
