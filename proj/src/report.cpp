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

#include <cmath>
#include <sstream>

#include "assignment_io.hpp"
#include "json_util.hpp"
#include "mdprune/solver.hpp"

namespace mdp {

using detail::Json;

std::string solution_report_json(const PruningProblem& problem,
                                 const PruningSolution& solution,
                                 const SolverConfig& config,
                                 const std::string& manifest_sha256) {
  const auto& arch = problem.arch();
  Json j = Json::object();
  j["manifest_sha256"] = manifest_sha256;
  j["arch"] = arch.name();
  j["status"] = std::string(to_string(solution.status));
  j["mode"] = std::string(to_string(config.mode));
  j["importance"] = solution.importance;
  j["latency"] = solution.latency;
  if (std::isfinite(problem.budget()))
    j["budget"] = problem.budget();
  else
    j["budget"] = nullptr;
  if (solution.status == SolveStatus::infeasible) {
    j["bound"] = nullptr;
    j["gap"] = nullptr;
  } else {
    j["bound"] = solution.bound;
    j["gap"] = std::max(0.0, solution.bound - solution.importance);
  }
  j["tolerance"] = config.tolerance;
  j["lambda_iters"] = config.lambda_iters;
  j["seed"] = config.rng_seed;
  j["node_count"] = solution.node_count;
  j["message"] = solution.message;
  j["subnetwork_count"] = subnetwork_count(arch).str();
  std::size_t kept = 0;
  for (auto k : solution.assignment.kappa) kept += k ? 1 : 0;
  j["depth"] = {{"kept", kept}, {"total", arch.block_count()}};
  j["assignment"] = detail::assignment_to_json(arch, solution.assignment);
  return j.dump(2) + "\n";
}

std::string assignment_csv(const ArchitectureSpec& arch,
                           const Assignment& assignment) {
  check_assignment(arch, assignment);
  std::ostringstream out;
  out << "block_id,kept,dim_id,role,option,kept_elements\n";
  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    const bool kept = assignment.kappa[b] != 0;
    for (std::size_t di : arch.resolved()[b].dims) {
      const auto& d = arch.dims()[di];
      const int opt = assignment.omega[di];
      out << arch.blocks()[b].id << ',' << (kept ? 1 : 0) << ',' << d.id << ','
          << to_string(d.role) << ',' << opt << ','
          << (kept ? kept_elements(d, opt) : 0) << '\n';
    }
  }
  return out.str();
}

PruningSolution parse_solution_report(std::string_view document,
                                      const PruningProblem& problem) {
  const Json j = detail::parse_document(document, "report");
  detail::require_object(j, "report");
  PruningSolution sol;
  const std::string status = detail::get_string(detail::member(j, "report", "status"), "report.status");
  if (status == "optimal")
    sol.status = SolveStatus::optimal;
  else if (status == "feasible_heuristic")
    sol.status = SolveStatus::feasible_heuristic;
  else if (status == "infeasible")
    sol.status = SolveStatus::infeasible;
  else
    throw ValidationError("report.status: unknown status '" + status + "'");
  sol.assignment = detail::assignment_from_json(detail::member(j, "report", "assignment"),
                                                "report.assignment", problem.arch());
  sol.importance = detail::get_number(detail::member(j, "report", "importance"), "report.importance");
  sol.latency = detail::get_number(detail::member(j, "report", "latency"), "report.latency");
  if (auto it = j.find("bound"); it != j.end() && !it->is_null())
    sol.bound = detail::get_number(*it, "report.bound");
  if (auto it = j.find("node_count"); it != j.end())
    sol.node_count = static_cast<std::uint64_t>(detail::get_integer(*it, "report.node_count"));
  if (auto it = j.find("message"); it != j.end())
    sol.message = detail::get_string(*it, "report.message");
  return sol;
}

}  // namespace mdp
