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

#ifndef MDPRUNE_SOLVER_HPP
#define MDPRUNE_SOLVER_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mdprune/arch.hpp"
#include "mdprune/importance.hpp"
#include "mdprune/latency.hpp"

namespace mdp {

/// Flat per-block view of the tables used by the inner loops.
struct CompiledLayer {
  std::size_t dim = 0;        // output dimension (global index)
  const LatencyTable* table;  // rows: input options, cols: output options
};

struct CompiledBlock {
  BlockKind kind = BlockKind::cnn_chain;
  bool removable = false;
  int id = 0;
  // cnn_chain
  std::size_t input_dim = 0;
  int input_option = 1;
  std::vector<CompiledLayer> layers;
  // transformer
  std::array<std::size_t, 5> slots{};
  std::array<std::size_t, 5> slot_pos{};  // position of each slot in the block
  const LatencyTable* qk = nullptr;
  const LatencyTable* vproj = nullptr;
  const LatencyTable* mlp = nullptr;
  // precomputed
  double max_importance = 0.0;  // sum of per-dim maxima
  double min_importance = 0.0;
  double min_latency = 0.0;     // cheapest kept configuration
};

/// Objective, constraint and budget of one pruning run. Immutable.
class PruningProblem {
 public:
  const ArchitectureSpec& arch() const { return data_->arch; }
  const ImportanceSet& vectors() const { return data_->vectors; }
  const LatencyTableSet& tables() const { return data_->tables; }
  double budget() const { return data_->budget; }
  const std::vector<CompiledBlock>& blocks() const { return data_->blocks; }

  /// max - min entry of each dimension's importance vector.
  const std::vector<double>& importance_range() const {
    return data_->importance_range;
  }
  /// Lowest latency reachable by any assignment (removable blocks removed).
  double min_total_latency() const { return data_->min_total_latency; }
  /// Upper end of the multiplier search interval.
  double lambda_max() const { return data_->lambda_max; }

 private:
  struct Data {
    ArchitectureSpec arch;
    ImportanceSet vectors;
    LatencyTableSet tables;
    double budget = 0.0;
    std::vector<CompiledBlock> blocks;
    std::vector<double> importance_range;
    double min_total_latency = 0.0;
    double lambda_max = 0.0;
  };
  std::shared_ptr<const Data> data_;

  friend PruningProblem assemble(ArchitectureSpec, ImportanceSet,
                                 LatencyTableSet, double);
};

/// Validates shapes and builds the problem. Throws ValidationError for shape
/// problems and ArgumentError for a non-positive (or NaN) budget. An infinite
/// budget is allowed.
PruningProblem assemble(ArchitectureSpec arch, ImportanceSet vectors,
                        LatencyTableSet tables, double budget);

enum class SolveStatus { optimal, feasible_heuristic, infeasible };
enum class SolveMode { exhaustive, branch_and_bound, heuristic_only };

std::string_view to_string(SolveStatus status);
std::string_view to_string(SolveMode mode);

struct SolverConfig {
  SolveMode mode = SolveMode::branch_and_bound;
  double time_limit = 60.0;  // seconds
  int lambda_iters = 64;
  double tolerance = 0.0;    // absolute optimality gap
  std::uint64_t rng_seed = 0;
  int threads = 1;
};

struct PruningSolution {
  Assignment assignment;
  double importance = 0.0;
  double latency = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  double bound = 0.0;
  std::uint64_t node_count = 0;
  double wall_time = 0.0;
  std::string message;
};

/// Sort key implementing the tie-break: kept blocks before removed ones
/// (block order), then option indices ascending (dimension order).
std::vector<int> tie_break_key(const ArchitectureSpec& arch,
                               const Assignment& assignment);

/// True if `a` beats `b`: higher importance, or equal importance and a
/// smaller tie-break key.
bool better_solution(const ArchitectureSpec& arch, double importance_a,
                     const Assignment& a, double importance_b,
                     const Assignment& b);

inline constexpr std::uint64_t kMaxExhaustiveStates = 1'000'000;

/// Enumerates every distinct structure. Throws LimitError above
/// kMaxExhaustiveStates.
PruningSolution solve_exhaustive(const PruningProblem& problem);

/// Per-dimension fixings for a subproblem: 0 means free, otherwise the
/// option. Block fixings: -1 free, 0 removed, 1 kept.
struct Fixings {
  std::vector<int> dims;
  std::vector<std::int8_t> blocks;

  static Fixings none(const ArchitectureSpec& arch) {
    return {std::vector<int>(arch.dim_count(), 0),
            std::vector<std::int8_t>(arch.block_count(), -1)};
  }
};

struct BlockResponse {
  double score = 0.0;  // importance - lambda * latency, 0 when removed
  double importance = 0.0;
  double latency = 0.0;
  bool kept = false;
  std::vector<int> options;  // one per block dim, block order
};

/// Maximizes importance - lambda * latency over the states of one block,
/// including removal for removable blocks.
BlockResponse block_best_response(const PruningProblem& problem,
                                  std::size_t block, double lambda);
BlockResponse block_best_response(const PruningProblem& problem,
                                  std::size_t block, double lambda,
                                  const Fixings& fixings);

/// Lagrangian upper bound on the optimal importance for a fixed multiplier.
double dual_bound(const PruningProblem& problem, double lambda);
double dual_bound(const PruningProblem& problem, double lambda,
                  const Fixings& fixings);

struct DualSearchResult {
  double bound = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
};

/// Golden-section search for the multiplier minimizing dual_bound over
/// [0, problem.lambda_max()].
DualSearchResult minimize_dual_bound(const PruningProblem& problem,
                                     int iterations);

struct RepairResult {
  Assignment assignment;
  bool success = false;
  std::vector<double> latency_path;  // latency after each applied move
};

/// Greedy descent to feasibility: repeatedly applies the option decrement
/// or block removal with the lowest importance loss per latency saved.
RepairResult repair_heuristic(const PruningProblem& problem,
                              const Assignment& start);

PruningSolution solve_branch_and_bound(const PruningProblem& problem,
                                       const SolverConfig& config);

/// Dispatches on config.mode and rechecks the returned latency against the
/// budget with an independent evaluation.
PruningSolution solve(const PruningProblem& problem, const SolverConfig& config);

/// Report JSON (deterministic, excludes wall time) and CSV assignment table.
std::string solution_report_json(const PruningProblem& problem,
                                 const PruningSolution& solution,
                                 const SolverConfig& config,
                                 const std::string& manifest_sha256);
std::string assignment_csv(const ArchitectureSpec& arch,
                           const Assignment& assignment);
/// Reads the assignment and status back from a report document.
PruningSolution parse_solution_report(std::string_view document,
                                      const PruningProblem& problem);

}  // namespace mdp

#endif  // MDPRUNE_SOLVER_HPP
