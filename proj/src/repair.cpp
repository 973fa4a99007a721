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

#include <limits>

#include "mdprune/solver.hpp"

namespace mdp {

RepairResult repair_heuristic(const PruningProblem& problem,
                              const Assignment& start) {
  const auto& arch = problem.arch();
  const auto& tables = problem.tables();
  const auto& vectors = problem.vectors();

  RepairResult out;
  Assignment cur = canonical(arch, start);
  check_assignment(arch, cur);
  double latency = constraint_value(cur, tables, arch);
  double importance = objective_value(cur, vectors, arch);

  while (!(latency <= problem.budget())) {
    // Candidate moves, scanned in block order: each dimension of a kept
    // block lowered to the largest option that strictly reduces latency,
    // then removal of the block. Lowest loss per ms saved wins; the first
    // candidate wins ties.
    double best_ratio = std::numeric_limits<double>::infinity();
    Assignment best_next;
    double best_latency = latency, best_importance = importance;
    bool found = false;
    auto consider = [&](const Assignment& next) {
      const double l = constraint_value(next, tables, arch);
      if (!(l < latency)) return false;
      const double i = objective_value(next, vectors, arch);
      const double ratio = (importance - i) / (latency - l);
      if (!found || ratio < best_ratio) {
        best_ratio = ratio;
        best_next = next;
        best_latency = l;
        best_importance = i;
        found = true;
      }
      return true;
    };
    for (std::size_t b = 0; b < arch.block_count(); ++b) {
      if (!cur.kappa[b]) continue;
      for (std::size_t di : arch.resolved()[b].dims) {
        Assignment next = cur;
        for (int o = cur.omega[di] - 1; o >= 1; --o) {
          next.omega[di] = o;
          if (consider(next)) break;
        }
      }
      if (arch.blocks()[b].removable) {
        Assignment next = cur;
        next.kappa[b] = 0;
        consider(canonical(arch, std::move(next)));
      }
    }
    if (!found) {
      out.assignment = std::move(cur);
      out.success = false;
      return out;
    }
    cur = std::move(best_next);
    latency = best_latency;
    importance = best_importance;
    out.latency_path.push_back(latency);
  }
  out.assignment = std::move(cur);
  out.success = true;
  return out;
}

}  // namespace mdp
