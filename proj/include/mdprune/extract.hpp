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

#ifndef MDPRUNE_EXTRACT_HPP
#define MDPRUNE_EXTRACT_HPP

#include <string>
#include <vector>

#include "mdprune/solver.hpp"

namespace mdp {

struct PrunedDimension {
  std::string dim_id;
  DimRole role = DimRole::conv_out;
  int option = 1;
  int original = 0;
  int kept = 0;
  std::vector<int> elements;  // 1-based original indices, ascending
};

struct PrunedBlock {
  int block_id = 0;
  BlockKind kind = BlockKind::cnn_chain;
  bool kept = true;
  std::vector<PrunedDimension> dims;  // empty when removed
};

struct PrunedStructure {
  std::string arch_name;
  std::vector<PrunedBlock> blocks;
  double importance = 0.0;
  double latency = 0.0;
  std::size_t depth = 0;  // kept blocks
  std::size_t original_depth = 0;
};

/// Applies a solution: removed blocks are dropped, every kept dimension
/// keeps its top-ranked elements. Importance and latency are recomputed
/// from the raw scores and tables rather than copied from the solver.
PrunedStructure extract_structure(const PruningSolution& solution,
                                  const PruningProblem& problem,
                                  const ScoreSet& raw_scores);

std::string structure_json(const PrunedStructure& structure,
                           const std::string& manifest_sha256);

struct Summary {
  std::string text;
  std::string csv;
};

/// Human-readable report and a width-profile CSV.
Summary summarize(const PrunedStructure& structure,
                  const std::string& manifest_sha256 = {});

}  // namespace mdp

#endif  // MDPRUNE_EXTRACT_HPP
