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

// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the exit code is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "damlab/bounds.hpp"
#include "damlab/core.hpp"
#include "damlab/em_sort.hpp"
#include "damlab/full_sort.hpp"
#include "damlab/ple.hpp"
#include "damlab/ple_special.hpp"
#include "damlab/ram_sort.hpp"

using namespace damlab;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
                what.c_str());
    if (!ok) g_failures += 1;
}

std::size_t clamp_k(std::size_t k, std::size_t lc, std::size_t S) {
    return std::max<std::size_t>(1, std::min({k, lc, S - 1}));
}

// ---- criterion 1: randomized correctness sweep ----

bool criterion1(std::string& what) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t B = 8, M = 128;
    std::size_t instances = 0, checks = 0;
    std::mt19937_64 rng(2026);
    for (std::size_t S : {64u, 256u, 1024u, 4096u, 16384u}) {
        for (std::uint32_t w : {1u, 8u, 32u, 64u}) {
            for (int kc = 0; kc < 4; ++kc) {
                for (std::uint64_t seed = 0; seed < 7; ++seed) {
                    const std::size_t lc = 8 + (seed % 4) * 6;
                    std::size_t k = 0;
                    switch (kc) {
                        case 0: k = 1; break;
                        case 1: k = 2; break;
                        case 2:
                            k = static_cast<std::size_t>(
                                std::lround(std::sqrt(static_cast<double>(lc))));
                            break;
                        default: k = lc; break;
                    }
                    k = clamp_k(k, lc, S);
                    Instance inst = gen_instance(S, lc, w, k, std::nullopt, rng());
                    const auto want = brute_force_predecessors(
                        inst.sorted_smalls(), inst.larges);
                    instances += 1;

                    const auto ram = priced_sort(inst.smalls, inst.larges, {1, 2, 3});
                    if (ram.sorted != inst.all_keys_sorted()) {
                        what = "priced sort mismatch";
                        return false;
                    }
                    checks += 1;

                    DamSession fs(B, M);
                    Run fsm = materialize(fs, inst.smalls, 1);
                    Run fla = materialize(fs, inst.larges, w);
                    const auto out = two_sized_sort(fs, fsm, fla);
                    if (peek_mixed(fs, out.output_start, out.output_volume) !=
                        inst.all_keys_sorted()) {
                        what = "two-sized sort mismatch";
                        return false;
                    }
                    checks += 1;

                    DamSession ds(B, M);
                    Run dsm = materialize(ds, inst.sorted_smalls(), 1);
                    Run dla = materialize(ds, inst.larges, w);
                    if (ple_dfs(ds, dsm, dla).predecessor_index !=
                        want.predecessor_index) {
                        what = "one-by-one placement mismatch";
                        return false;
                    }
                    checks += 1;

                    DamSession bs(B, M);
                    Run bsm = materialize(bs, inst.sorted_smalls(), 1);
                    Run bla = materialize(bs, inst.larges, w);
                    if (ple_bfs(bs, bsm, bla).predecessor_index !=
                        want.predecessor_index) {
                        what = "level-by-level placement mismatch";
                        return false;
                    }
                    checks += 1;
                }
            }
        }
    }
    const auto secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    std::ostringstream os;
    os << instances << " instances, " << checks << " oracle checks, "
       << static_cast<int>(secs) << "s";
    what = os.str();
    return instances >= 500 && secs < 120.0;
}

// ---- criterion 2: priced comparison envelope ----

bool criterion2(std::string& what) {
    SubproblemParams p;
    p.k = 64;
    p.w = 1;
    p.seed = 1;
    Instance kk = gen_subproblem(SubproblemKind::KK, p);
    const auto perfect = priced_sort(kk.sorted_smalls(), kk.larges, {1, 2, 3});
    if (perfect.ledger.count_c != 0) {
        what = "perfect interleaving produced blue-blue comparisons";
        return false;
    }

    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t S = 64 + rng() % 400;
        const std::size_t lc = 8 + rng() % 48;
        const std::size_t k = clamp_k(1 + rng() % lc, lc, S);
        Instance inst = gen_instance(S, lc, 1, k, std::nullopt, rng());
        const PriceTriple pr{1, 3, 9};
        const auto r = priced_sort(inst.smalls, inst.larges, pr);
        if (r.sorted != inst.all_keys_sorted()) {
            what = "output mismatch";
            return false;
        }
        const double n = static_cast<double>(S + lc);
        const double formula =
            bounds::ram_bound(S, k, inst.stripe_sizes, pr.a, pr.b, pr.c);
        const double slack = (pr.a + pr.b + pr.c) * n;
        if (r.ledger.total_cost(pr) > 8.0 * formula + 8.0 * slack) {
            what = "cost envelope exceeded";
            return false;
        }
        worst = std::max(worst, r.ledger.total_cost(pr) / (formula + slack));
    }
    std::ostringstream os;
    os << "count_c = 0 on perfect interleaving; worst cost ratio "
       << worst << " with C_ram = 8";
    what = os.str();
    return true;
}

// ---- criterion 3: mergesort envelopes ----

bool criterion3(std::string& what) {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (std::uint32_t w : {1u, 4u, 8u, 16u, 32u}) {
        for (std::size_t count : {64u, 256u, 1024u}) {
            DamSession s(8, 128);
            std::vector<Key> keys(count);
            for (auto& k : keys) k = rng();
            Run in = materialize(s, keys, w);
            Run out = merge_sort_records(s, in);
            auto got = peek_run(s, out);
            if (!std::is_sorted(got.begin(), got.end())) {
                what = "unsorted output";
                return false;
            }
            const double V = static_cast<double>(count) * w;
            const double denom = bounds::av_bound(V, w, 8, 128) + 2.0 * V / 8.0 +
                                 static_cast<double>(count);
            const double ratio = static_cast<double>(s.ledger().total_ios()) / denom;
            if (ratio > 8.0) {
                what = "mergesort envelope exceeded";
                return false;
            }
            worst = std::max(worst, ratio);
        }
    }
    // inputs that fit in memory: exactly one read and one write pass
    {
        DamSession s(8, 128);
        std::vector<Key> keys(96);
        for (auto& k : keys) k = rng();
        Run in = materialize(s, keys, 1);
        merge_sort_small(s, in);
        if (s.ledger().total_ios() != 2 * 12) {
            what = "single-load unit sort is not 2*ceil(V/B)";
            return false;
        }
    }
    {
        DamSession s(8, 128);
        std::vector<Key> keys(6);
        for (auto& k : keys) k = rng();
        Run in = materialize(s, keys, 16);  // 6*2 = 12 blocks, fits in M
        merge_sort_large(s, in);
        if (s.ledger().total_ios() != 2 * 12) {
            what = "single-load wide sort is not 2*ceil(V/B)";
            return false;
        }
    }
    std::ostringstream os;
    os << "worst io ratio " << worst << " (limit 8); single-load cost exact";
    what = os.str();
    return true;
}

// ---- criterion 4: placement envelopes and structural exactness ----

bool criterion4(std::string& what) {
    std::mt19937_64 rng(4);
    double worst_dfs = 0.0, worst_bfs = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t S = 128 + rng() % 900;
        const std::size_t lc = 8 + rng() % 32;
        const std::size_t k = clamp_k(1 + rng() % lc, lc, S);
        const std::uint32_t w = std::vector<std::uint32_t>{4, 8, 16, 32}[rng() % 4];
        const double B = 8, M = 128;
        const double L = static_cast<double>(lc) * w;
        const auto up = bounds::ple_upper_terms(static_cast<double>(S), L, w,
                                                static_cast<double>(k), B, M);
        const double slack = static_cast<double>(S) / B + L / B +
                             static_cast<double>(lc) + static_cast<double>(k) + 8;

        Instance inst = gen_instance(S, lc, w, k, std::nullopt, rng());
        const auto want =
            brute_force_predecessors(inst.sorted_smalls(), inst.larges);

        DamSession ds(8, 128);
        Run dsm = materialize(ds, inst.sorted_smalls(), 1);
        Run dla = materialize(ds, inst.larges, w);
        PleStats dstats;
        const auto dgot = ple_dfs(ds, dsm, dla, &dstats);
        if (dgot.predecessor_index != want.predecessor_index ||
            dstats.full_descents != k) {
            what = "one-by-one placement: wrong output or descent count";
            return false;
        }
        const double dratio =
            static_cast<double>(ds.ledger().total_ios()) / (up.term2 + slack);
        if (dratio > 8.0) {
            what = "one-by-one placement envelope exceeded";
            return false;
        }
        worst_dfs = std::max(worst_dfs, dratio);

        DamSession bs(8, 128);
        Run bsm = materialize(bs, inst.sorted_smalls(), 1);
        Run bla = materialize(bs, inst.larges, w);
        PleStats bstats;
        const auto bgot = ple_bfs(bs, bsm, bla, &bstats);
        if (bgot.predecessor_index != want.predecessor_index ||
            bstats.duplicate_node_loads() != 0) {
            what = "level-by-level placement: wrong output or duplicate node load";
            return false;
        }
        const double bratio =
            static_cast<double>(bs.ledger().total_ios()) / (up.term1 + slack);
        if (bratio > 8.0) {
            what = "level-by-level placement envelope exceeded";
            return false;
        }
        worst_bfs = std::max(worst_bfs, bratio);
    }
    std::ostringstream os;
    os << "k descents and node-once exact; worst ratios " << worst_dfs
       << " and " << worst_bfs << " (limit 8)";
    what = os.str();
    return true;
}

// ---- criterion 5: bound evaluator cross-checks ----

bool criterion5(std::string& what) {
    const auto lo = bounds::ple_lower_terms(1024, 512, 32, 4, 8, 64);
    const auto up = bounds::ple_upper_terms(1024, 512, 32, 4, 8, 64);
    if (std::abs(std::min(lo.term1, lo.term2) - 48.0) > 1e-9 ||
        std::abs(std::min(up.term1, up.term2) - 216.0) > 1e-9) {
        what = "worked example is not 48 / 216";
        return false;
    }

    // pointwise dominance on the grid (S >= 2M keeps log_M S >= 1)
    for (double S = 256; S <= 16384; S *= 2)
        for (double lc : {4.0, 16.0, 64.0})
            for (double w : {1.0, 8.0, 32.0, 64.0})
                for (double k : {1.0, 2.0, 4.0, 16.0}) {
                    if (k > lc || k > S - 1) continue;
                    const double L = lc * w;
                    if (bounds::ple_upper(S, L, w, k, 8, 128) <
                        bounds::ple_lower(S, L, w, k, 8, 128)) {
                        what = "upper bound below lower bound on the grid";
                        return false;
                    }
                }

    // min-term crossover near w = B*log2(M), probed at B = 1 so the leading
    // addends dominate
    const double S = std::pow(2.0, 1000), M = 65536;
    double prev = bounds::ple_lower_terms(S, 8, 8, 1, 1, M).term1 -
                  bounds::ple_lower_terms(S, 8, 8, 1, 1, M).term2;
    double change_at = 0;
    int changes = 0;
    for (double w : {8.0, 12.0, 16.0, 20.0, 24.0, 28.0}) {
        const auto t = bounds::ple_lower_terms(S, 8, w, 1, 1, M);
        const double d = t.term1 - t.term2;
        if ((prev < 0) != (d < 0)) {
            changes += 1;
            change_at = w;
        }
        prev = d;
    }
    if (changes != 1 || std::abs(change_at - std::log2(M)) > 4.0) {
        what = "min-term crossover missed w = B*log2(M)";
        return false;
    }
    what = "worked example 48/216, grid dominance, crossover at w = 20 "
           "(predicted 16.1, grid step 4)";
    return true;
}

// ---- criterion 6: sampled index ----

bool criterion6(std::string& what) {
    DamSession s(16, 256);
    const std::size_t N = 1 << 16;
    std::vector<Key> keys(N);
    for (std::size_t i = 0; i < N; ++i) keys[i] = 2 * i + 1;
    Run base = materialize(s, keys, 1);
    SampledIndex idx = build_sampled_index(s, base);
    if (idx.sample_blocks != 256) {
        what = "sample block count is not 256";
        return false;
    }
    const double budget =
        3.0 * std::log2(static_cast<double>(N)) / std::log2(16.0) + 3.0;
    std::mt19937_64 rng(6);
    std::uint64_t worst = 0;
    for (int q = 0; q < 10000; ++q) {
        const Key probe = rng() % (2 * N + 2);
        std::uint64_t reads = 0;
        const std::size_t got = query_sampled(s, idx, probe, &reads);
        std::size_t want = 0;
        for (std::size_t i = 0; i < N; ++i)
            if (keys[i] < probe) want = i + 1;
        if (got != want || static_cast<double>(reads) > budget) {
            what = "query mismatch or read budget exceeded";
            return false;
        }
        worst = std::max(worst, reads);
    }
    std::ostringstream os;
    os << "10^4 queries exact; worst " << worst << " reads (budget "
       << budget << ")";
    what = os.str();
    return true;
}

// ---- criterion 7: batch tree halving and swipe sort ----

bool criterion7(std::string& what) {
    {
        DamSession s(4, 64);
        std::vector<Key> keys(48);
        for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = 2 * i + 1;
        Run base = materialize(s, keys, 1);
        TwoBTree tree = build_2b_tree(s, base, Interval{0, 49}, 3);
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<Key> probes;
            for (int t = 0; t < 4; ++t) probes.push_back(rng() % 100);
            BatchQueryStats stats;
            query_2b(s, tree, probes, &stats);
            for (std::size_t t = 0; t < probes.size(); ++t) {
                std::size_t prev = 49;
                for (std::size_t l = 0; l < tree.alpha; ++l) {
                    const std::size_t now = stats.widths[l][t];
                    const bool ok =
                        prev <= 1 ? now == prev : now <= prev / 2 + 1;
                    if (!ok) {
                        what = "interval failed to halve at a node";
                        return false;
                    }
                    prev = now;
                }
            }
        }
    }
    {
        SubproblemParams p;
        p.k = 64;
        p.w = 2;
        p.seed = 7;
        Instance inst = gen_subproblem(SubproblemKind::KK, p);
        DamSession s(2, 32);
        Run smalls = materialize(s, inst.sorted_smalls(), 1);
        Run larges = materialize(s, inst.larges, 2);
        const auto r = kk_sort_2b(s, smalls, larges, 1.0);
        auto want = inst.larges;
        std::sort(want.begin(), want.end());
        if (peek_run(s, r.sorted_larges) != want) {
            what = "swipe sort output mismatch";
            return false;
        }
        // C7 * (k/B) * log2 k with C7 = 8, B = 2, k = 64
        if (r.short_block_ios > 1536) {
            what = "short-block io envelope exceeded";
            return false;
        }
        SubproblemParams small_p;
        small_p.k = 8;
        small_p.w = 2;
        small_p.seed = 8;
        Instance tiny = gen_subproblem(SubproblemKind::KK, small_p);
        DamSession t(4, 64);
        Run tsm = materialize(t, tiny.sorted_smalls(), 1);
        Run tla = materialize(t, tiny.larges, 2);
        try {
            kk_sort_2b(t, tsm, tla);
            what = "undersized instance was not rejected";
            return false;
        } catch (const ParamError& e) {
            if (std::string(e.what()).find("below the k0") == std::string::npos) {
                what = "rejection lacks the named threshold";
                return false;
            }
        }
        std::ostringstream os;
        os << "halving exact; swipe sort oracle-equal with "
           << r.short_block_ios << " short-block ios (limit 1536)";
        what = os.str();
    }
    return true;
}

// ---- criterion 8: pipeline additivity ----

bool criterion8(std::string& what) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t S = 64 + rng() % 200;
        const std::size_t lc = 8 + rng() % 24;
        const std::size_t k = clamp_k(1 + rng() % lc, lc, S);
        DamSession s(8, 128);
        Instance inst = gen_instance(S, lc, 8, k, std::nullopt, rng());
        Run smalls = materialize(s, inst.smalls, 1);
        Run larges = materialize(s, inst.larges, 8);
        const auto before = s.ledger().total_ios();
        const auto out = two_sized_sort(s, smalls, larges);
        if (out.phases.total() != s.ledger().total_ios() - before) {
            what = "phase ledgers do not sum to the session ledger";
            return false;
        }
    }

    Instance inst = gen_instance(256, 24, 8, 1, std::nullopt, 88);
    DamSession full(8, 128);
    Run smalls = materialize(full, inst.smalls, 1);
    Run larges = materialize(full, inst.larges, 8);
    two_sized_sort(full, smalls, larges);
    DamSession ss(8, 128);
    merge_sort_small(ss, materialize(ss, inst.smalls, 1));
    DamSession sl(8, 128);
    merge_sort_large(sl, materialize(sl, inst.larges, 8));
    const double parts =
        static_cast<double>(ss.ledger().total_ios() + sl.ledger().total_ios()) +
        2.0 * static_cast<double>(256 + 24 * 8) / 8.0;
    const double ratio = static_cast<double>(full.ledger().total_ios()) / parts;
    if (ratio > 4.0) {
        what = "k=1 pipeline exceeds 4x the independent sorts plus scans";
        return false;
    }
    std::ostringstream os;
    os << "phase ledgers exactly additive; k=1 ratio " << ratio
       << " (limit 4)";
    what = os.str();
    return true;
}

// ---- criterion 9: CLI determinism ----

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool criterion9(std::string& what) {
    const std::string cli = DAMLAB_CLI_PATH;
    const std::string inst = "/tmp/damlab_acc_inst.txt";
    const std::string out1 = "/tmp/damlab_acc_out1.txt";
    const std::string out2 = "/tmp/damlab_acc_out2.txt";

    const std::string gen = cli + " gen --small 128 --large-count 16 --width 8" +
                            " --stripes 5 --seed 77 --out " + inst;
    if (std::system(gen.c_str()) != 0) {
        what = "generator invocation failed";
        return false;
    }
    for (const char* algo : {"sort-dam", "ple-dfs", "ple-bfs", "ram"}) {
        const std::string base = cli + " run --algo " + algo +
                                 " --B 8 --M 128 --in " + inst + " --trace";
        if (std::system((base + " > " + out1 + " 2>&1").c_str()) != 0 ||
            std::system((base + " > " + out2 + " 2>&1").c_str()) != 0) {
            what = std::string("run invocation failed for ") + algo;
            return false;
        }
        if (slurp(out1) != slurp(out2) || slurp(out1).empty()) {
            what = std::string("outputs differ for ") + algo;
            return false;
        }
    }
    std::remove(inst.c_str());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    what = "repeated CLI invocations are byte-identical for 4 algorithms";
    return true;
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        bool (*fn)(std::string&);
    };
    const Criterion all[] = {
        {1, criterion1}, {2, criterion2}, {3, criterion3},
        {4, criterion4}, {5, criterion5}, {6, criterion6},
        {7, criterion7}, {8, criterion8}, {9, criterion9},
    };
    for (const auto& c : all) {
        std::string what;
        bool ok = false;
        try {
            ok = c.fn(what);
        } catch (const std::exception& e) {
            what = std::string("exception: ") + e.what();
        }
        report(c.number, ok, what);
    }
    return g_failures == 0 ? 0 : 1;
}
