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

#include <algorithm>
#include <cmath>

#include "mdprune/error.hpp"
#include "mdprune/solver.hpp"
#include "mdprune/validate.hpp"
#include "solver_internal.hpp"

namespace mdp {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_heuristic: return "feasible_heuristic";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "?";
}

std::string_view to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::exhaustive: return "exhaustive";
    case SolveMode::branch_and_bound: return "branch_and_bound";
    case SolveMode::heuristic_only: return "heuristic_only";
  }
  return "?";
}

PruningProblem assemble(ArchitectureSpec arch, ImportanceSet vectors,
                        LatencyTableSet tables, double budget) {
  if (std::isnan(budget) || budget <= 0.0)
    throw ArgumentError("latency budget must be positive (got " +
                        std::to_string(budget) + ")");
  validate_problem_shapes(arch, tables, vectors);
  for (const auto& v : vectors.vectors())
    for (double x : v.values)
      if (!std::isfinite(x))
        throw ValidationError("importance vector for '" + v.dim_id +
                              "' has a non-finite entry");

  auto data = std::make_shared<PruningProblem::Data>();
  data->arch = std::move(arch);
  data->vectors = std::move(vectors);
  data->tables = std::move(tables);
  data->budget = budget;

  const auto& a = data->arch;
  for (const auto& v : data->vectors.vectors()) {
    const auto [lo, hi] = std::minmax_element(v.values.begin(), v.values.end());
    data->importance_range.push_back(*hi - *lo);
  }

  for (std::size_t b = 0; b < a.block_count(); ++b) {
    const auto& spec = a.blocks()[b];
    const auto& res = a.resolved()[b];
    CompiledBlock cb;
    cb.kind = spec.kind;
    cb.removable = spec.removable;
    cb.id = spec.id;
    if (spec.kind == BlockKind::cnn_chain) {
      cb.input_dim = res.input_dim;
      cb.input_option = a.dims()[res.input_dim].option_count;
      for (std::size_t k = 0; k < res.dims.size(); ++k)
        cb.layers.push_back(
            {res.dims[k],
             &data->tables.get(spec.id, TablePart::conv(static_cast<int>(k) + 1))});
    } else {
      cb.slots = res.slots;
      for (int s = 0; s < 5; ++s)
        cb.slot_pos[s] = static_cast<std::size_t>(
            std::find(res.dims.begin(), res.dims.end(), res.slots[s]) -
            res.dims.begin());
      cb.qk = &data->tables.get(spec.id, TablePart::qk());
      cb.vproj = &data->tables.get(spec.id, TablePart::vproj());
      cb.mlp = &data->tables.get(spec.id, TablePart::mlp());
    }
    for (std::size_t di : res.dims) {
      const auto& vals = data->vectors[di].values;
      cb.max_importance += *std::max_element(vals.begin(), vals.end());
      cb.min_importance += *std::min_element(vals.begin(), vals.end());
    }
    data->blocks.push_back(std::move(cb));
  }

  PruningProblem problem;
  problem.data_ = data;

  double imax = 0.0, imin = 0.0, cmin = 0.0;
  for (std::size_t b = 0; b < data->blocks.size(); ++b) {
    auto& cb = data->blocks[b];
    cb.min_latency = -detail::best_kept_state(problem, b, 0.0, 1.0, nullptr, nullptr).score;
    if (cb.removable) {
      imax += std::max(0.0, cb.max_importance);
      imin += std::min(0.0, cb.min_importance);
    } else {
      imax += cb.max_importance;
      imin += cb.min_importance;
      cmin += cb.min_latency;
    }
  }
  data->min_total_latency = cmin;

  // Past lambda_max the bound exceeds its value at 0, so the minimizer lies
  // in [0, lambda_max].
  if (!std::isfinite(budget)) {
    data->lambda_max = 0.0;
  } else {
    const double slack = std::max(budget - cmin, 1e-12 * std::max(1.0, budget));
    data->lambda_max = std::max(imax - imin, 1e-12) / slack;
  }
  return problem;
}

std::vector<int> tie_break_key(const ArchitectureSpec& arch,
                               const Assignment& assignment) {
  const Assignment a = canonical(arch, assignment);
  std::vector<int> key;
  key.reserve(arch.block_count() + arch.dim_count());
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    key.push_back(a.kappa[b] ? 0 : 1);
  for (int o : a.omega) key.push_back(o);
  return key;
}

bool better_solution(const ArchitectureSpec& arch, double importance_a,
                     const Assignment& a, double importance_b,
                     const Assignment& b) {
  if (importance_a != importance_b) return importance_a > importance_b;
  return tie_break_key(arch, a) < tie_break_key(arch, b);
}

PruningSolution solve(const PruningProblem& problem, const SolverConfig& config) {
  if (!(config.time_limit > 0.0)) throw ArgumentError("time_limit must be positive");
  if (config.lambda_iters < 0) throw ArgumentError("lambda_iters must be >= 0");
  if (config.tolerance < 0.0) throw ArgumentError("tolerance must be >= 0");
  if (config.threads < 1) throw ArgumentError("threads must be >= 1");

  PruningSolution sol;
  switch (config.mode) {
    case SolveMode::exhaustive: sol = solve_exhaustive(problem); break;
    case SolveMode::branch_and_bound:
    case SolveMode::heuristic_only: sol = solve_branch_and_bound(problem, config); break;
  }
  if (sol.status != SolveStatus::infeasible) {
    // Independent recheck against the tables.
    const double latency = constraint_value(sol.assignment, problem.tables(), problem.arch());
    if (!(latency <= problem.budget()))
      throw Error(ErrorKind::internal,
                  "solver returned an assignment over budget (" +
                      std::to_string(latency) + " > " +
                      std::to_string(problem.budget()) + ")");
    sol.latency = latency;
    sol.importance = objective_value(sol.assignment, problem.vectors(), problem.arch());
  }
  return sol;
}

}  // namespace mdp
