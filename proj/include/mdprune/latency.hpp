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

#ifndef MDPRUNE_LATENCY_HPP
#define MDPRUNE_LATENCY_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "mdprune/arch.hpp"
#include "mdprune/importance.hpp"

namespace mdp {

enum class PartKind { conv_layer, qk, vproj, mlp };

std::string_view to_string(PartKind kind);

/// Which decomposed piece of a block a table prices. `layer` is the 1-based
/// layer position for conv_layer and 0 otherwise.
struct TablePart {
  PartKind kind = PartKind::conv_layer;
  int layer = 0;

  static TablePart conv(int layer) { return {PartKind::conv_layer, layer}; }
  static TablePart qk() { return {PartKind::qk, 0}; }
  static TablePart vproj() { return {PartKind::vproj, 0}; }
  static TablePart mlp() { return {PartKind::mlp, 0}; }

  /// conv_layer(i), qk, vproj or mlp.
  std::string label() const;
  std::size_t rank() const {
    return kind == PartKind::qk || kind == PartKind::vproj ? 3 : 2;
  }
  auto operator<=>(const TablePart&) const = default;
};

/// Dense latency tensor in milliseconds, row-major, indexed by 0-based
/// option positions along each axis.
struct LatencyTable {
  int block_id = 0;
  TablePart part;
  std::vector<std::string> axes;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  double at(std::span<const int> zero_based) const;
  double at(int i, int j) const { return data[i * shape[1] + j]; }
  double at(int i, int j, int k) const {
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  bool operator==(const LatencyTable&) const = default;
};

/// All tables for an architecture, looked up by (block id, part).
class LatencyTableSet {
 public:
  LatencyTableSet() = default;
  /// Throws ValidationError on duplicate (block, part) entries or broken
  /// table invariants (rank, shape/data size, negative or non-finite data).
  explicit LatencyTableSet(std::vector<LatencyTable> tables);

  const LatencyTable* find(int block_id, TablePart part) const;
  /// Throws ValidationError naming the missing table.
  const LatencyTable& get(int block_id, TablePart part) const;
  const std::vector<LatencyTable>& tables() const { return tables_; }

 private:
  std::vector<LatencyTable> tables_;
  std::map<std::tuple<int, TablePart>, std::size_t> index_;
};

/// Checks one table's own invariants. Throws ValidationError.
void check_table(const LatencyTable& table);

/// Decomposed block-gated latency: per-layer lookups for cnn_chain blocks,
/// qk + vproj + mlp lookups for transformer blocks, zero for removed blocks.
double constraint_value(const Assignment& assignment,
                        const LatencyTableSet& tables,
                        const ArchitectureSpec& arch);

/// Latency of block `block` if it is kept.
double block_latency(const Assignment& assignment,
                     const LatencyTableSet& tables,
                     const ArchitectureSpec& arch, std::size_t block);

/// Full (undecomposed) latency tensor of one block over the block's own
/// dimensions, in block order.
struct BlockTensor {
  std::size_t block = 0;
  std::vector<std::size_t> shape;
  std::vector<double> data;
};

inline constexpr std::size_t kMaxJointEntries = 10'000'000;

/// Builds the full tensor whose entries are the sum of the decomposed parts
/// at each configuration. Throws LimitError above kMaxJointEntries.
BlockTensor embed_block_tensor(const ArchitectureSpec& arch,
                               const LatencyTableSet& tables,
                               std::size_t block);

/// Joint evaluation: the one-hot vectors of each block are combined by a
/// chain of outer products, multiplied elementwise with the block tensor and
/// summed. Meant as a cross-check, it touches every tensor entry.
double joint_constraint_value(const Assignment& assignment,
                              const std::vector<BlockTensor>& full_tables,
                              const ArchitectureSpec& arch);

struct LatencyModelParams {
  double unit_cost = 1e-6;  // ms per multiply-accumulate-equivalent
  double overhead = 0.01;   // ms per kernel launch
  int tile = 32;
  double spatial = 1.0;
  double noise = 0.02;  // relative amplitude, 0 turns noise off
};

/// Synthetic cost-model tables for every block of `arch`.
LatencyTableSet synth_lut(const ArchitectureSpec& arch,
                          const LatencyModelParams& params, std::uint64_t seed);

/// Latency of a layer with `in_elems` inputs and `out_elems` outputs under
/// the noise-free synthetic cost model.
double synth_conv_cost(const LatencyModelParams& params, int in_elems,
                       int out_elems);

/// T(row, col) with 1-based options and T(row, 0) = 0.
double table_entry_or_zero(const LatencyTable& table, int row, int col);

/// Marginal cost of the j-th output option when the input is pinned at
/// option `p_prev`: T(p_prev, j) - T(p_prev, j - 1).
double linear_channel_cost(const LatencyTable& table, int p_prev, int j);

struct EstimationError {
  double epsilon = 0.0;
  double bound = 0.0;
};

/// Error of the single-row marginal cost when the true input is `p_hat`
/// instead of `p_prev`, plus its triangle-inequality bound. Requires
/// p_hat <= p_prev.
EstimationError estimation_error(const LatencyTable& table, int p_prev,
                                 int p_hat, int j);

/// Successive configurations of an iterative pruning schedule.
struct PruneTrajectory {
  std::vector<Assignment> steps;
};

struct LayerEstimate {
  int block_id = 0;
  int layer = 0;
  int p_prev = 0;
  int p_hat = 0;
  int j = 0;
  double true_latency = 0.0;
  double linear_latency = 0.0;
  double epsilon = 0.0;
  double bound = 0.0;
};

struct StepEstimate {
  double true_latency = 0.0;
  double linear_estimate = 0.0;
  double gap = 0.0;  // linear_estimate - true_latency
  std::vector<LayerEstimate> layers;
};

struct TrajectoryReport {
  std::vector<StepEstimate> steps;
};

/// Replays a pruning schedule on cnn_chain tables. Each step's linear
/// estimate prices every layer with the input option of the previous step.
/// Throws ArgumentError for transformer blocks or increasing widths.
TrajectoryReport replay_trajectory(const PruneTrajectory& trajectory,
                                   const LatencyTableSet& tables,
                                   const ArchitectureSpec& arch);

/// Evenly spaced shrink from every option at its maximum to option 1.
PruneTrajectory uniform_trajectory(const ArchitectureSpec& arch, int steps);

LatencyTableSet parse_lut(std::string_view document);
LatencyTableSet load_lut(const std::string& path);

enum class PayloadEncoding { text, base64 };
std::string serialize_lut(const LatencyTableSet& tables,
                          PayloadEncoding encoding = PayloadEncoding::text,
                          const std::string& manifest_sha256 = {});

PruneTrajectory parse_trajectory(std::string_view document,
                                 const ArchitectureSpec& arch);

}  // namespace mdp

#endif  // MDPRUNE_LATENCY_HPP
