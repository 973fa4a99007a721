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

#include <chrono>

#include "mdprune/error.hpp"
#include "mdprune/solver.hpp"
#include "solver_internal.hpp"

namespace mdp {

PruningSolution solve_exhaustive(const PruningProblem& problem) {
  const auto start = std::chrono::steady_clock::now();
  const auto& arch = problem.arch();
  const BigInt states = subnetwork_count(arch);
  if (states > kMaxExhaustiveStates)
    throw LimitError("exhaustive search over " + states.str() +
                     " states exceeds the limit of " +
                     std::to_string(kMaxExhaustiveStates));

  // Per-block odometer: digits 0..S_b-1, where the last digit of a
  // removable block means "removed".
  const std::size_t nb = arch.block_count();
  std::vector<std::size_t> counts(nb), digit(nb, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    std::size_t s = 1;
    for (std::size_t di : arch.resolved()[b].dims) s *= arch.dims()[di].option_count;
    counts[b] = s + (arch.blocks()[b].removable ? 1 : 0);
  }

  PruningSolution best;
  bool have = false;
  Assignment a = full_assignment(arch);
  std::uint64_t visited = 0;
  for (;;) {
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& dims = arch.resolved()[b].dims;
      const bool removed = arch.blocks()[b].removable && digit[b] + 1 == counts[b];
      a.kappa[b] = removed ? 0 : 1;
      std::size_t rest = removed ? 0 : digit[b];
      for (std::size_t k = dims.size(); k-- > 0;) {
        const auto c = static_cast<std::size_t>(arch.dims()[dims[k]].option_count);
        a.omega[dims[k]] = removed ? 1 : static_cast<int>(rest % c) + 1;
        rest /= c;
      }
    }
    ++visited;
    const double latency = constraint_value(a, problem.tables(), arch);
    if (latency <= problem.budget()) {
      const double importance = objective_value(a, problem.vectors(), arch);
      if (!have || better_solution(arch, importance, a, best.importance, best.assignment)) {
        best.assignment = a;
        best.importance = importance;
        best.latency = latency;
        have = true;
      }
    }
    std::size_t b = nb;
    while (b-- > 0) {
      if (++digit[b] < counts[b]) break;
      digit[b] = 0;
    }
    if (b == static_cast<std::size_t>(-1)) break;
  }

  best.node_count = visited;
  if (have) {
    best.status = SolveStatus::optimal;
    best.bound = best.importance;
  } else {
    best.status = SolveStatus::infeasible;
    best.assignment = detail::min_latency_assignment(problem);
    best.latency = constraint_value(best.assignment, problem.tables(), arch);
    best.importance = objective_value(best.assignment, problem.vectors(), arch);
    best.bound = best.importance;
    best.message = "no assignment meets the budget: minimum latency " +
                   std::to_string(best.latency) + " ms > budget " +
                   std::to_string(problem.budget()) + " ms";
  }
  best.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return best;
}

}  // namespace mdp
