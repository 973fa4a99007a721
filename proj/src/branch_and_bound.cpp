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

// Depth-first branch-and-bound over the block flags and dimension options.
//
// Variables are branched in a fixed order: block keep/remove flags first
// (blocks with the largest attainable importance first), then dimensions by
// descending importance range. Every child is bounded by the Lagrangian dual
// of its subproblem, minimized over the multiplier by golden-section search;
// the best responses met along the way double as primal candidates.
//
// Children of one node are evaluated independently (possibly in parallel)
// against the incumbent as it stood before the expansion, and their primal
// candidates are merged in child order afterwards. The search therefore
// visits the same nodes and returns the same answer for any thread count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "mdprune/error.hpp"
#include "mdprune/solver.hpp"
#include "solver_internal.hpp"
#include "thread_pool.hpp"

namespace mdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Variable {
  bool is_block = false;
  std::size_t index = 0;  // block index or global dim index
  std::size_t owner = 0;  // owning block
  int values = 2;
};

struct Node {
  Fixings fix;
  std::size_t next_var = 0;
  double bound = kInf;
};

struct Evaluation {
  double bound = kInf;
  bool pruned = false;
  std::optional<Assignment> candidate;
};

class Search {
 public:
  Search(const PruningProblem& problem, const SolverConfig& config)
      : problem_(problem),
        arch_(problem.arch()),
        config_(config),
        pool_(config.threads),
        start_(std::chrono::steady_clock::now()) {
    build_order();
  }

  PruningSolution run(bool branch) {
    PruningSolution sol;
    const double budget = problem_.budget();

    // The cheapest assignment decides feasibility.
    const Assignment cheapest = detail::min_latency_assignment(problem_);
    const double cheapest_latency = constraint_value(cheapest, problem_.tables(), arch_);
    if (!(cheapest_latency <= budget)) {
      sol.status = SolveStatus::infeasible;
      sol.assignment = cheapest;
      sol.latency = cheapest_latency;
      sol.importance = objective_value(cheapest, problem_.vectors(), arch_);
      sol.bound = -kInf;
      sol.message = "no assignment meets the budget: minimum latency " +
                    std::to_string(cheapest_latency) + " ms > budget " +
                    std::to_string(budget) + " ms";
      sol.wall_time = elapsed();
      return sol;
    }
    consider(cheapest);
    const auto repaired = repair_heuristic(problem_, full_assignment(arch_));
    if (repaired.success) consider(repaired.assignment);

    Node root{Fixings::none(arch_), 0, kInf};
    const Evaluation root_eval = evaluate(root.fix, -kInf);
    ++nodes_;
    if (root_eval.candidate) consider(*root_eval.candidate);
    root.bound = root_eval.bound;

    bool timed_out = false;
    double open_bound = -kInf;
    if (!branch) {
      open_bound = root.bound;
    } else {
      std::vector<Node> stack;
      stack.push_back(std::move(root));
      while (!stack.empty()) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (prunable(node.bound)) {
          pruned_max_ = std::max(pruned_max_, node.bound);
          continue;
        }
        if (elapsed() > config_.time_limit) {
          timed_out = true;
          open_bound = std::max(open_bound, node.bound);
          for (const auto& n : stack) open_bound = std::max(open_bound, n.bound);
          break;
        }
        expand(std::move(node), stack);
      }
    }

    sol.assignment = incumbent_;
    sol.importance = incumbent_value_;
    sol.latency = constraint_value(incumbent_, problem_.tables(), arch_);
    sol.node_count = nodes_;
    if (!branch) {
      sol.status = SolveStatus::feasible_heuristic;
      sol.bound = std::max(open_bound, incumbent_value_);
      sol.message = "heuristic solution; bound from the Lagrangian dual";
    } else if (timed_out) {
      sol.status = SolveStatus::feasible_heuristic;
      sol.bound = std::max({open_bound, pruned_max_, incumbent_value_});
      sol.message = "time limit reached; best feasible solution returned";
    } else {
      sol.status = SolveStatus::optimal;
      sol.bound = std::max(pruned_max_, incumbent_value_);
    }
    sol.wall_time = elapsed();
    return sol;
  }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  double slack() const {
    return 1e-9 * (1.0 + std::fabs(incumbent_value_));
  }

  /// Nodes whose bound cannot beat (or, at zero tolerance, tie) the
  /// incumbent are discarded. Ties are kept so the tie-break sees them.
  bool prunable(double bound) const {
    if (!have_incumbent_) return false;
    if (config_.tolerance > 0.0) return bound <= incumbent_value_ + config_.tolerance;
    return bound < incumbent_value_ - slack();
  }

  void consider(const Assignment& candidate) {
    const Assignment a = canonical(arch_, candidate);
    const double latency = constraint_value(a, problem_.tables(), arch_);
    if (!(latency <= problem_.budget())) return;
    const double value = objective_value(a, problem_.vectors(), arch_);
    if (!have_incumbent_ ||
        better_solution(arch_, value, a, incumbent_value_, incumbent_)) {
      incumbent_ = a;
      incumbent_value_ = value;
      have_incumbent_ = true;
    }
  }

  void build_order() {
    const auto& blocks = problem_.blocks();
    std::vector<std::size_t> bidx;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      if (blocks[b].removable) bidx.push_back(b);
    std::stable_sort(bidx.begin(), bidx.end(), [&](std::size_t x, std::size_t y) {
      return blocks[x].max_importance > blocks[y].max_importance;
    });
    for (std::size_t b : bidx) order_.push_back({true, b, b, 2});

    std::vector<std::size_t> didx;
    for (std::size_t b = 0; b < arch_.block_count(); ++b)
      for (std::size_t di : arch_.resolved()[b].dims)
        if (arch_.dims()[di].option_count > 1) didx.push_back(di);
    std::sort(didx.begin(), didx.end());
    const auto& range = problem_.importance_range();
    std::stable_sort(didx.begin(), didx.end(), [&](std::size_t x, std::size_t y) {
      return range[x] > range[y];
    });
    for (std::size_t di : didx)
      order_.push_back({false, di, *arch_.owner_block(di), arch_.dims()[di].option_count});
  }

  /// First variable at or after `pos` that still matters under `fix`.
  std::size_t next_free(const Fixings& fix, std::size_t pos) const {
    while (pos < order_.size()) {
      const auto& v = order_[pos];
      if (v.is_block) {
        if (fix.blocks[v.index] < 0) return pos;
      } else if (fix.blocks[v.owner] != 0 && fix.dims[v.index] == 0) {
        return pos;
      }
      ++pos;
    }
    return pos;
  }

  /// Assignment for a fully fixed subproblem.
  Assignment leaf_assignment(const Fixings& fix) const {
    Assignment a = full_assignment(arch_);
    for (std::size_t b = 0; b < arch_.block_count(); ++b) {
      a.kappa[b] = fix.blocks[b] == 0 ? 0 : 1;
      for (std::size_t di : arch_.resolved()[b].dims)
        a.omega[di] = fix.blocks[b] == 0 ? 1 : std::max(1, fix.dims[di]);
    }
    return a;
  }

  /// Bounds one subproblem. `threshold` is the value below which the
  /// subproblem can be discarded; the search stops early once it is met.
  Evaluation evaluate(const Fixings& fix, double threshold) const {
    Evaluation ev;
    const std::size_t nb = arch_.block_count();
    const double budget = problem_.budget();

    if (next_free(fix, 0) == order_.size()) {
      const Assignment a = leaf_assignment(fix);
      const double latency = constraint_value(a, problem_.tables(), arch_);
      if (latency <= budget) {
        ev.bound = objective_value(a, problem_.vectors(), arch_);
        ev.candidate = a;
      } else {
        ev.bound = -kInf;
      }
      ev.pruned = ev.bound < threshold;
      return ev;
    }

    std::vector<BlockResponse> responses(nb);
    double best_feasible = -kInf;
    auto dual_at = [&](double lambda) {
      double total = 0.0, importance = 0.0, latency = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        responses[b] = block_best_response(problem_, b, lambda, fix);
        total += responses[b].score;
        importance += responses[b].importance;
        latency += responses[b].latency;
      }
      if (lambda > 0.0) total += lambda * budget;
      if (latency <= budget && importance > best_feasible) {
        best_feasible = importance;
        Assignment a = full_assignment(arch_);
        for (std::size_t b = 0; b < nb; ++b) {
          a.kappa[b] = responses[b].kept ? 1 : 0;
          detail::apply_block_options(arch_, b, responses[b].options, a);
        }
        ev.candidate = std::move(a);
      }
      ev.bound = std::min(ev.bound, total);
      return total;
    };

    dual_at(0.0);
    // A feasible unconstrained maximizer is optimal for the subproblem.
    if (best_feasible > -kInf || ev.bound < threshold || !std::isfinite(budget)) {
      ev.pruned = ev.bound < threshold;
      return ev;
    }
    double lo = 0.0, hi = problem_.lambda_max();
    if (hi > 0.0 && config_.lambda_iters > 0) {
      constexpr double kInvPhi = 0.6180339887498949;
      double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
      double f1 = dual_at(x1), f2 = dual_at(x2);
      for (int it = 2; it < config_.lambda_iters && ev.bound >= threshold; ++it) {
        if (f1 <= f2) {
          hi = x2;
          x2 = x1, f2 = f1;
          x1 = hi - kInvPhi * (hi - lo);
          f1 = dual_at(x1);
        } else {
          lo = x1;
          x1 = x2, f1 = f2;
          x2 = lo + kInvPhi * (hi - lo);
          f2 = dual_at(x2);
        }
      }
    }
    ev.pruned = ev.bound < threshold;
    return ev;
  }

  double threshold() const {
    if (!have_incumbent_) return -kInf;
    if (config_.tolerance > 0.0) return incumbent_value_ + config_.tolerance;
    return incumbent_value_ - slack();
  }

  void expand(Node node, std::vector<Node>& stack) {
    const std::size_t pos = next_free(node.fix, node.next_var);
    if (pos == order_.size()) {
      consider(leaf_assignment(node.fix));
      return;
    }
    const Variable& var = order_[pos];
    std::vector<Node> children;
    if (var.is_block) {
      for (std::int8_t k : {std::int8_t{1}, std::int8_t{0}}) {
        Node child{node.fix, pos + 1, kInf};
        child.fix.blocks[var.index] = k;
        children.push_back(std::move(child));
      }
    } else {
      for (int o = 1; o <= var.values; ++o) {
        Node child{node.fix, pos + 1, kInf};
        child.fix.dims[var.index] = o;
        children.push_back(std::move(child));
      }
    }

    const double thr = threshold();
    std::vector<Evaluation> evals(children.size());
    pool_.parallel_for(children.size(), [&](std::size_t i) {
      evals[i] = evaluate(children[i].fix, thr);
    });
    nodes_ += children.size();

    for (auto& ev : evals)
      if (ev.candidate) consider(*ev.candidate);

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < children.size(); ++i) {
      children[i].bound = evals[i].bound;
      if (evals[i].pruned || prunable(evals[i].bound)) {
        if (evals[i].bound > -kInf) pruned_max_ = std::max(pruned_max_, evals[i].bound);
        continue;
      }
      keep.push_back(i);
    }
    // Best bound on top of the stack.
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t x, std::size_t y) {
      return children[x].bound > children[y].bound;
    });
    for (auto it = keep.rbegin(); it != keep.rend(); ++it)
      stack.push_back(std::move(children[*it]));
  }

  const PruningProblem& problem_;
  const ArchitectureSpec& arch_;
  SolverConfig config_;
  mutable detail::ThreadPool pool_;
  std::chrono::steady_clock::time_point start_;
  std::vector<Variable> order_;

  Assignment incumbent_;
  double incumbent_value_ = -kInf;
  bool have_incumbent_ = false;
  double pruned_max_ = -kInf;
  std::uint64_t nodes_ = 0;
};

}  // namespace

PruningSolution solve_branch_and_bound(const PruningProblem& problem,
                                       const SolverConfig& config) {
  Search search(problem, config);
  return search.run(config.mode != SolveMode::heuristic_only);
}

}  // namespace mdp
