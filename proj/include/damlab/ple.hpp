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
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "damlab/core.hpp"
#include "damlab/dam.hpp"

namespace damlab {

/// Static bulk-loaded B-tree over a sorted width-1 run. levels[0] is the base
/// run itself; each higher level samples the first key of every block below.
struct StaticBTree {
    std::vector<Run> levels;
    std::size_t height() const { return levels.size(); }  // blocks per descent
};

StaticBTree build_static_btree(DamSession& s, const Run& sorted_base);

/// Root-to-leaf predecessor descent. `strictly_below` must say whether a pivot
/// record's key is < the probe. Returns the 1-based predecessor position
/// (0 = probe below everything). Each level costs one block read.
std::size_t btree_predecessor(DamSession& s, const StaticBTree& tree,
                              const std::function<bool(Handle)>& strictly_below);

struct PleStats {
    std::size_t full_descents = 0;  // DFS: static-tree root descents
    std::vector<std::pair<std::size_t, std::size_t>> node_loads;  // BFS: (level, node)
    bool border_tree_on_disk = false;
    std::size_t duplicate_node_loads() const;
};

enum class BorderMode { Auto, Memory, Disk };

/// Search larges one by one in a static B-tree on the smalls; repeats within a
/// discovered stripe are resolved by the dynamic border structure alone.
StripeAssignment ple_dfs(DamSession& s, const Run& sorted_smalls, const Run& larges,
                         PleStats* stats = nullptr, BorderMode mode = BorderMode::Auto);

/// Route all larges level by level through a high-fanout tree on the smalls;
/// every tree node is brought into memory at most once.
StripeAssignment ple_bfs(DamSession& s, const Run& sorted_smalls, const Run& larges,
                         PleStats* stats = nullptr);

struct PleChoice {
    bool used_dfs = false;
    double dfs_bound = 0.0;
    double bfs_bound = 0.0;
};

/// Run whichever algorithm the upper-bound formulas predict to be cheaper.
StripeAssignment ple_auto(DamSession& s, const Run& sorted_smalls, const Run& larges,
                          std::size_t k_hint, PleChoice* choice = nullptr,
                          PleStats* stats = nullptr);

}  // namespace damlab
