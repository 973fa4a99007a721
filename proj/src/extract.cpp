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

#include "mdprune/extract.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "json_util.hpp"
#include "mdprune/error.hpp"

namespace mdp {

using detail::Json;

PrunedStructure extract_structure(const PruningSolution& solution,
                                  const PruningProblem& problem,
                                  const ScoreSet& raw_scores) {
  if (solution.status == SolveStatus::infeasible)
    throw ArgumentError("cannot extract a structure from an infeasible solution");
  const auto& arch = problem.arch();
  check_assignment(arch, solution.assignment);

  std::unordered_map<std::string, const RawScores*> scores;
  for (const auto& s : raw_scores) scores.emplace(s.dim_id, &s);

  PrunedStructure out;
  out.arch_name = arch.name();
  out.original_depth = arch.block_count();
  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    PrunedBlock pb;
    pb.block_id = arch.blocks()[b].id;
    pb.kind = arch.blocks()[b].kind;
    pb.kept = solution.assignment.kappa[b] != 0;
    if (pb.kept) {
      ++out.depth;
      double block_total = 0.0;
      for (std::size_t di : arch.resolved()[b].dims) {
        const auto& d = arch.dims()[di];
        auto it = scores.find(d.id);
        if (it == scores.end())
          throw ValidationError("no scores for retained dimension '" + d.id + "'");
        const auto& raw = it->second->scores;
        if (raw.size() != static_cast<std::size_t>(d.max_elements))
          throw ValidationError("scores for dimension '" + d.id + "' have " +
                                std::to_string(raw.size()) + " entries, expected " +
                                std::to_string(d.max_elements));
        PrunedDimension pd;
        pd.dim_id = d.id;
        pd.role = d.role;
        pd.option = solution.assignment.omega[di];
        pd.original = d.max_elements;
        pd.kept = kept_elements(d, pd.option);
        const auto order = rank_elements(raw);
        double sum = 0.0;
        for (int k = 0; k < pd.kept; ++k) {
          sum += raw[order[k]];
          pd.elements.push_back(static_cast<int>(order[k]) + 1);
        }
        std::sort(pd.elements.begin(), pd.elements.end());
        block_total += sum;
        pb.dims.push_back(std::move(pd));
      }
      out.importance += block_total;
    }
    out.blocks.push_back(std::move(pb));
  }
  out.latency = constraint_value(solution.assignment, problem.tables(), arch);
  return out;
}

std::string structure_json(const PrunedStructure& s,
                           const std::string& manifest_sha256) {
  Json j = Json::object();
  j["manifest_sha256"] = manifest_sha256;
  j["arch"] = s.arch_name;
  j["importance"] = s.importance;
  j["latency"] = s.latency;
  j["depth"] = {{"kept", s.depth}, {"total", s.original_depth}};
  Json blocks = Json::array();
  for (const auto& b : s.blocks) {
    Json jb = {{"block_id", b.block_id},
               {"kind", std::string(to_string(b.kind))},
               {"kept", b.kept}};
    Json dims = Json::array();
    for (const auto& d : b.dims)
      dims.push_back({{"dim_id", d.dim_id},
                      {"role", std::string(to_string(d.role))},
                      {"option", d.option},
                      {"original", d.original},
                      {"kept", d.kept},
                      {"elements", d.elements}});
    jb["dims"] = std::move(dims);
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  return j.dump(2) + "\n";
}

Summary summarize(const PrunedStructure& s, const std::string& manifest_sha256) {
  std::ostringstream text, csv;
  text.precision(17);
  if (!manifest_sha256.empty()) {
    text << "manifest_sha256: " << manifest_sha256 << '\n';
    csv << "# manifest_sha256: " << manifest_sha256 << '\n';
  }
  text << "architecture: " << s.arch_name << '\n'
       << "depth: " << s.depth << '/' << s.original_depth << " blocks kept ("
       << (s.original_depth - s.depth) << " removed)\n"
       << "importance: " << s.importance << '\n'
       << "latency_ms: " << s.latency << '\n';
  if (s.depth == 0 && s.original_depth > 0)
    text << "DEGENERATE: every block was removed; the pruned network is empty\n";
  csv << "block_id,kept,dim_id,role,original,kept_elements,ratio\n";
  csv.precision(6);
  for (const auto& b : s.blocks) {
    if (!b.kept) {
      text << "block " << b.block_id << " (" << to_string(b.kind) << "): removed\n";
      csv << b.block_id << ",0,,,,0,0\n";
      continue;
    }
    text << "block " << b.block_id << " (" << to_string(b.kind) << "):";
    for (const auto& d : b.dims) {
      text << ' ' << d.dim_id << '=' << d.kept << '/' << d.original;
      csv << b.block_id << ",1," << d.dim_id << ',' << to_string(d.role) << ','
          << d.original << ',' << d.kept << ','
          << static_cast<double>(d.kept) / d.original << '\n';
    }
    text << '\n';
  }
  return {text.str(), csv.str()};
}

}  // namespace mdp
