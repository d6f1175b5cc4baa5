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

#include "damlab/core.hpp"
#include "damlab/dam.hpp"

using namespace damlab;

TEST_CASE("load_block brings one block in for one read") {
    DamSession s(4, 16);
    std::vector<Key> keys{10, 20, 30, 40};
    Run r = materialize(s, keys, 1);
    auto handles = s.load_block(r.start / 4);
    CHECK(s.ledger().reads == 1);
    CHECK(handles.size() == 4);
    CHECK(s.resident_volume() == 4);
    s.evict(std::span<const Handle>(handles), false);
    CHECK(s.resident_volume() == 0);
}

TEST_CASE("load_record charges ceil(w/B) reads") {
    DamSession s(4, 32);
    SUBCASE("w=8 B=4 costs 2") {
        Run r = materialize(s, std::vector<Key>{7}, 8);
        s.load_record(r.start);
        CHECK(s.ledger().reads == 2);
    }
    SUBCASE("w=B costs 1") {
        Run r = materialize(s, std::vector<Key>{7}, 4);
        s.load_record(r.start);
        CHECK(s.ledger().reads == 1);
    }
    SUBCASE("w=10 B=4 costs 3") {
        Run r = materialize(s, std::vector<Key>{7}, 10);
        s.load_record(r.start);
        CHECK(s.ledger().reads == 3);
    }
}

TEST_CASE("loading the same address twice charges twice") {
    DamSession s(4, 32);
    Run r = materialize(s, std::vector<Key>{1, 2, 3, 4}, 1);
    auto h1 = s.load_block(r.start / 4);
    s.evict(std::span<const Handle>(h1), false);
    auto h2 = s.load_block(r.start / 4);
    CHECK(s.ledger().reads == 2);
    s.evict(std::span<const Handle>(h2), false);
}

TEST_CASE("memory overflow raises a residency violation") {
    DamSession s(4, 4);
    Run r = materialize(s, std::vector<Key>{1, 2, 3, 4, 5, 6, 7, 8}, 1);
    auto h = s.load_block(r.start / 4);
    CHECK_THROWS_AS(s.load_block(r.start / 4 + 1), ResidencyError);
    s.evict(std::span<const Handle>(h), false);
}

TEST_CASE("evict write-back charges per contiguous extent") {
    DamSession s(4, 32);
    SUBCASE("clean wide record writes nothing") {
        Run r = materialize(s, std::vector<Key>{5}, 8);
        Handle h = s.load_record(r.start);
        s.evict(h, false);
        CHECK(s.ledger().writes == 0);
    }
    SUBCASE("dirty wide record writes 2 blocks") {
        Run r = materialize(s, std::vector<Key>{5}, 8);
        Handle h = s.load_record(r.start);
        s.evict(h, true);
        CHECK(s.ledger().writes == 2);
    }
    SUBCASE("dirty run of 3 units in one block writes 1") {
        Run r = materialize(s, std::vector<Key>{1, 2, 3}, 1);
        auto hs = s.load_block(r.start / 4);
        s.evict(std::span<const Handle>(hs), true);
        CHECK(s.ledger().writes == 1);
    }
}

TEST_CASE("compare requires residency and distinct keys") {
    DamSession s(4, 32);
    Run r = materialize(s, std::vector<Key>{3, 5}, 1);
    auto hs = s.load_block(r.start / 4);
    CHECK(s.compare(hs[0], hs[1]) == std::strong_ordering::less);
    const auto reads_before = s.ledger().reads;
    CHECK(s.ledger().reads == reads_before);  // comparisons are free
    Handle gone = hs[1];
    s.evict(gone, false);
    CHECK_THROWS_AS(s.compare(hs[0], gone), ResidencyError);
    Handle dup = s.clone(hs[0]);
    CHECK_THROWS_AS(s.compare(hs[0], dup), ContractError);
    s.evict(hs[0], false);
    s.evict(dup, false);
}

TEST_CASE("records round-trip through evict and reload") {
    DamSession s(4, 32);
    Run r = materialize(s, std::vector<Key>{11, 22, 33, 44}, 1);
    auto hs = s.load_block(r.start / 4);
    Run dst{s.alloc(4), 0, 1};
    for (Handle h : hs) {
        s.rehome(h, dst.start + dst.count);
        dst.count += 1;
    }
    s.evict(std::span<const Handle>(hs), true);
    CHECK(peek_run(s, dst) == std::vector<Key>{11, 22, 33, 44});
    auto back = s.load_block(dst.start / 4);
    CHECK(back.size() == 4);
    s.evict(std::span<const Handle>(back), false);
}

TEST_CASE("trace replay recomputes the counters exactly") {
    DamSession s(4, 32);
    s.ledger().tracing = true;
    Run r = materialize(s, std::vector<Key>{1, 2, 3, 4, 5, 6, 7, 8}, 1);
    auto h1 = s.load_block(r.start / 4);
    auto h2 = s.load_block(r.start / 4 + 1);
    Run dst{s.alloc(8), 0, 1};
    std::vector<Handle> all(h1.begin(), h1.end());
    all.insert(all.end(), h2.begin(), h2.end());
    for (Handle h : all) {
        s.rehome(h, dst.start + dst.count);
        dst.count += 1;
    }
    s.evict(std::span<const Handle>(all), true);
    const auto [reads, writes] = s.ledger().replay();
    CHECK(reads == s.ledger().reads);
    CHECK(writes == s.ledger().writes);
    CHECK(!s.ledger().dump_trace().empty());
}

TEST_CASE("a block holding part of a wide record cannot be block-loaded") {
    DamSession s(4, 32);
    Run r = materialize(s, std::vector<Key>{9}, 8);
    CHECK_THROWS_AS(s.load_block(r.start / 4), ContractError);
}
