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

#include <span>
#include <vector>

#include "damlab/core.hpp"
#include "damlab/dam.hpp"

namespace damlab {

/// Multiway external mergesort, fanout floor(M/B)-1 for packed widths
/// (w <= B) and floor(M/w') for block-aligned wide records (w > B).
/// Returns a freshly allocated sorted run; the input region is left stale.
Run merge_sort_records(DamSession& s, const Run& input);

/// Width-1 convenience wrapper. Requires M >= 3B.
Run merge_sort_small(DamSession& s, const Run& input);

/// Wide-record path (w >= B). Requires floor(M/w) >= 2.
Run merge_sort_large(DamSession& s, const Run& input);

/// The i-th stripe extent inside a stripe-grouped region (each stripe starts
/// at a block boundary).
Run stripe_sub_run(const Run& grouped, std::span<const std::size_t> sizes,
                   std::size_t i, std::size_t B);

/// Sort each stripe of an already stripe-grouped large region independently.
/// Every stripe must start at a block boundary (regrouping guarantees this).
/// Returns the k sorted runs in stripe order.
std::vector<Run> sort_stripes(DamSession& s, const Run& grouped,
                              std::span<const std::size_t> stripe_sizes);

}  // namespace damlab
