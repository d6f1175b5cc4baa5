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
#include <doctest.h>

#include <random>
#include <vector>

#include "damlab/core.hpp"
#include "damlab/em_sort.hpp"
#include "damlab/full_sort.hpp"

using namespace damlab;

namespace {

struct Staged {
    Instance inst;
    Run smalls;
    Run larges;
};

Staged stage(DamSession& s, std::size_t S, std::size_t lc, std::uint32_t w,
             std::size_t k, std::uint64_t seed) {
    Staged st{gen_instance(S, lc, w, k, std::nullopt, seed), {}, {}};
    st.smalls = materialize(s, st.inst.smalls, 1);
    st.larges = materialize(s, st.inst.larges, w);
    return st;
}

}  // namespace

TEST_CASE("the mixed output is the fully sorted key sequence") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t S = 24 + rng() % 160;
        const std::size_t lc = 4 + rng() % 32;
        const std::size_t k = 1 + rng() % std::min(lc, S - 1);
        const std::uint32_t w = std::vector<std::uint32_t>{1, 4, 8, 12}[rng() % 4];
        DamSession s(4, 64);
        Staged st = stage(s, S, lc, w, k, rng());
        const auto out = two_sized_sort(s, st.smalls, st.larges);
        CHECK(peek_mixed(s, out.output_start, out.output_volume) ==
              st.inst.all_keys_sorted());
        CHECK(out.assignment.stripe_count == k);
        CHECK(out.stripe_sizes == st.inst.stripe_sizes);
    }
}

TEST_CASE("phase ledgers add up to the session ledger exactly") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 10; ++trial) {
        DamSession s(4, 64);
        Staged st = stage(s, 64 + rng() % 64, 8 + rng() % 16, 8,
                          2 + rng() % 6, rng());
        const auto before = s.ledger().total_ios();
        const auto out = two_sized_sort(s, st.smalls, st.larges);
        CHECK(out.phases.total() == s.ledger().total_ios() - before);
    }
}

TEST_CASE("a single stripe costs little more than two independent sorts") {
    const std::size_t S = 128, lc = 16;
    const std::uint32_t w = 8;
    Instance inst = gen_instance(S, lc, w, 1, std::nullopt, 83);

    DamSession full(4, 64);
    Run smalls = materialize(full, inst.smalls, 1);
    Run larges = materialize(full, inst.larges, w);
    two_sized_sort(full, smalls, larges);

    DamSession solo_s(4, 64);
    merge_sort_small(solo_s, materialize(solo_s, inst.smalls, 1));
    DamSession solo_l(4, 64);
    merge_sort_large(solo_l, materialize(solo_l, inst.larges, w));

    const double scan = 2.0 * static_cast<double>(S + lc * w) / 4.0;
    const double parts = static_cast<double>(solo_s.ledger().total_ios() +
                                             solo_l.ledger().total_ios()) +
                         scan;
    CHECK(static_cast<double>(full.ledger().total_ios()) <= 4.0 * parts);
}

TEST_CASE("perfect interleaving yields singleton stripes and no stripe sorting") {
    SubproblemParams p;
    p.k = 16;
    p.w = 8;
    p.seed = 89;
    Instance inst = gen_subproblem(SubproblemKind::KK, p);
    DamSession s(4, 64);
    Run smalls = materialize(s, inst.sorted_smalls(), 1);
    Run larges = materialize(s, inst.larges, p.w);
    const auto out =
        two_sized_sort(s, smalls, larges, PleAlgo::Auto, p.k, true);
    CHECK(out.stripe_sizes == std::vector<std::size_t>(16, 1));
    CHECK(peek_mixed(s, out.output_start, out.output_volume) ==
          inst.all_keys_sorted());
}

TEST_CASE("forcing either placement algorithm changes cost, not output") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 8; ++trial) {
        const std::uint64_t seed = rng();
        std::vector<Key> got[3];
        int i = 0;
        for (PleAlgo algo : {PleAlgo::Auto, PleAlgo::Dfs, PleAlgo::Bfs}) {
            DamSession s(4, 64);
            Staged st = stage(s, 96, 12, 8, 4, seed);
            const auto out = two_sized_sort(s, st.smalls, st.larges, algo);
            got[i] = peek_mixed(s, out.output_start, out.output_volume);
            i += 1;
        }
        CHECK(got[0] == got[1]);
        CHECK(got[0] == got[2]);
    }
}

TEST_CASE("presorted smalls skip the first phase") {
    DamSession s(4, 64);
    Instance inst = gen_instance(64, 8, 8, 2, std::nullopt, 101);
    Run smalls = materialize(s, inst.sorted_smalls(), 1);
    Run larges = materialize(s, inst.larges, 8);
    const auto out =
        two_sized_sort(s, smalls, larges, PleAlgo::Auto, 0, true);
    CHECK(out.phases.sort_smalls == 0);
    CHECK(peek_mixed(s, out.output_start, out.output_volume) ==
          inst.all_keys_sorted());
}
