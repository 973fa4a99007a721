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

#ifndef MDPRUNE_VALIDATE_HPP
#define MDPRUNE_VALIDATE_HPP

#include "mdprune/arch.hpp"
#include "mdprune/importance.hpp"
#include "mdprune/latency.hpp"

namespace mdp {

/// Checks that every dimension has an importance vector of option_count
/// entries and every block has tables whose axes and extents match its
/// dimensions. Throws ValidationError naming the block, table, axis and
/// expected/found sizes.
void validate_problem_shapes(const ArchitectureSpec& arch,
                             const LatencyTableSet& tables,
                             const ImportanceSet& importances);

/// Tables only (used when no scores are supplied).
void validate_table_shapes(const ArchitectureSpec& arch,
                           const LatencyTableSet& tables);

/// Expected axes of each table a block needs.
struct ExpectedTable {
  TablePart part;
  std::vector<std::size_t> axes;  // global dim indices
};
std::vector<ExpectedTable> expected_tables(const ArchitectureSpec& arch,
                                           std::size_t block);

}  // namespace mdp

#endif  // MDPRUNE_VALIDATE_HPP
