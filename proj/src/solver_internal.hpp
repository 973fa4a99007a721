// Copyright 2026 The mdprune Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDPRUNE_SRC_SOLVER_INTERNAL_HPP
#define MDPRUNE_SRC_SOLVER_INTERNAL_HPP

#include <cstdint>
#include <vector>

#include "mdprune/solver.hpp"

namespace mdp::detail {

/// Maximizes weight * importance - lambda * latency over the kept states of
/// one block (removal is decided by the caller). `dim_fix` holds per-dim
/// fixings (0 = free) or is null. Fills `options` (block order) when non-null.
struct KeptResponse {
  double score = 0.0;
  double importance = 0.0;
  double latency = 0.0;
};
KeptResponse best_kept_state(const PruningProblem& problem, std::size_t block,
                             double weight, double lambda,
                             const int* dim_fix, std::vector<int>* options);

/// Writes a block's options (block order) into a full assignment.
void apply_block_options(const ArchitectureSpec& arch, std::size_t block,
                         const std::vector<int>& options, Assignment& a);

/// Cheapest assignment: every block at its lowest-latency configuration,
/// removable blocks removed.
Assignment min_latency_assignment(const PruningProblem& problem);

}  // namespace mdp::detail

#endif  // MDPRUNE_SRC_SOLVER_INTERNAL_HPP
