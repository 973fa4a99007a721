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

#ifndef MDPRUNE_IMPORTANCE_HPP
#define MDPRUNE_IMPORTANCE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mdprune/arch.hpp"

namespace mdp {

/// Per-element saliency for one dimension, in original element order.
struct RawScores {
  std::string dim_id;
  std::vector<double> scores;

  bool operator==(const RawScores&) const = default;
};

using ScoreSet = std::vector<RawScores>;

/// Entry j-1 holds the importance of keeping option j along the dimension.
struct ImportanceVector {
  std::string dim_id;
  std::vector<double> values;
};

/// Importance vectors indexed by global dimension index of an architecture.
class ImportanceSet {
 public:
  ImportanceSet() = default;
  explicit ImportanceSet(std::vector<ImportanceVector> by_dim)
      : vectors_(std::move(by_dim)) {}

  const ImportanceVector& operator[](std::size_t dim_index) const {
    return vectors_[dim_index];
  }
  std::size_t size() const { return vectors_.size(); }
  const std::vector<ImportanceVector>& vectors() const { return vectors_; }

 private:
  std::vector<ImportanceVector> vectors_;
};

/// Solver decision: one option per dimension (1-based) plus a keep flag per
/// block. Dimensions outside every block sit at their last option; blocks
/// that are not removable are always kept.
struct Assignment {
  std::vector<int> omega;
  std::vector<std::uint8_t> kappa;

  bool operator==(const Assignment&) const = default;
};

/// Every dimension at its last option, every block kept.
Assignment full_assignment(const ArchitectureSpec& arch);
/// Every dimension at option 1, every removable block kept.
Assignment minimal_assignment(const ArchitectureSpec& arch);
/// Throws ArgumentError when `a` does not fit `arch`.
void check_assignment(const ArchitectureSpec& arch, const Assignment& a);
/// Resets the options of removed blocks to 1 so equal structures compare
/// equal.
Assignment canonical(const ArchitectureSpec& arch, Assignment a);

/// Sort order used for ranking elements: descending score, ties by original
/// index ascending.
std::vector<std::size_t> rank_elements(const std::vector<double>& scores);

/// Entry j is the sum of the top kept_elements(dim, j) scores.
ImportanceVector build_importance_vector(const RawScores& raw,
                                         const DimensionSpec& dim);

/// Builds one vector per dimension of `arch`. Every dimension needs scores.
ImportanceSet build_importance_set(const ArchitectureSpec& arch,
                                   const ScoreSet& scores);

/// Block-gated importance: sum over kept blocks of the selected entries.
double objective_value(const Assignment& assignment,
                       const ImportanceSet& vectors,
                       const ArchitectureSpec& arch);

/// Importance contributed by block `block` if it is kept.
double block_importance(const Assignment& assignment,
                        const ImportanceSet& vectors,
                        const ArchitectureSpec& arch, std::size_t block);

ScoreSet parse_scores(std::string_view document);
ScoreSet load_scores(const std::string& path);
std::string serialize_scores(const ScoreSet& scores,
                             const std::string& manifest_sha256 = {});

enum class ScoreDistribution { uniform01, exponential };

/// Deterministic nonnegative scores for every dimension of `arch`.
ScoreSet synth_scores(const ArchitectureSpec& arch, std::uint64_t seed,
                      ScoreDistribution distribution);

}  // namespace mdp

#endif  // MDPRUNE_IMPORTANCE_HPP
