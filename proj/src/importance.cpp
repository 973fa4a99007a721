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

#include "mdprune/importance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "json_util.hpp"
#include "mdprune/error.hpp"
#include "rng.hpp"

namespace mdp {

Assignment full_assignment(const ArchitectureSpec& arch) {
  Assignment a;
  a.omega.reserve(arch.dim_count());
  for (const auto& d : arch.dims()) a.omega.push_back(d.option_count);
  a.kappa.assign(arch.block_count(), 1);
  return a;
}

Assignment minimal_assignment(const ArchitectureSpec& arch) {
  Assignment a = full_assignment(arch);
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    for (std::size_t di : arch.resolved()[b].dims) a.omega[di] = 1;
  return a;
}

void check_assignment(const ArchitectureSpec& arch, const Assignment& a) {
  if (a.omega.size() != arch.dim_count())
    throw ArgumentError("assignment has " + std::to_string(a.omega.size()) +
                        " options, architecture has " +
                        std::to_string(arch.dim_count()) + " dimensions");
  if (a.kappa.size() != arch.block_count())
    throw ArgumentError("assignment has " + std::to_string(a.kappa.size()) +
                        " block flags, architecture has " +
                        std::to_string(arch.block_count()) + " blocks");
  for (std::size_t i = 0; i < arch.dim_count(); ++i) {
    const auto& d = arch.dims()[i];
    if (a.omega[i] < 1 || a.omega[i] > d.option_count)
      throw ArgumentError("option " + std::to_string(a.omega[i]) +
                          " out of range for dimension '" + d.id + "'");
    if (!arch.owner_block(i) && a.omega[i] != d.option_count)
      throw ArgumentError("dimension '" + d.id +
                          "' is outside every block and cannot be pruned");
  }
  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    if (a.kappa[b] > 1)
      throw ArgumentError("block flag must be 0 or 1");
    if (!a.kappa[b] && !arch.blocks()[b].removable)
      throw ArgumentError("block " + std::to_string(arch.blocks()[b].id) +
                          " is not removable");
  }
}

Assignment canonical(const ArchitectureSpec& arch, Assignment a) {
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    if (!a.kappa[b])
      for (std::size_t di : arch.resolved()[b].dims) a.omega[di] = 1;
  return a;
}

std::vector<std::size_t> rank_elements(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  return order;
}

ImportanceVector build_importance_vector(const RawScores& raw,
                                         const DimensionSpec& dim) {
  if (raw.scores.size() != static_cast<std::size_t>(dim.max_elements))
    throw ValidationError("scores for dimension '" + dim.id + "' have " +
                          std::to_string(raw.scores.size()) +
                          " entries, expected " +
                          std::to_string(dim.max_elements));
  const auto order = rank_elements(raw.scores);
  ImportanceVector out{dim.id, {}};
  out.values.reserve(dim.option_count);
  double acc = 0.0;
  std::size_t taken = 0;
  for (int j = 1; j <= dim.option_count; ++j) {
    const auto kept = static_cast<std::size_t>(kept_elements(dim, j));
    for (; taken < kept; ++taken) acc += raw.scores[order[taken]];
    out.values.push_back(acc);
  }
  return out;
}

ImportanceSet build_importance_set(const ArchitectureSpec& arch,
                                   const ScoreSet& scores) {
  std::unordered_map<std::string, const RawScores*> by_id;
  for (const auto& s : scores) {
    if (!arch.find_dim(s.dim_id))
      throw ValidationError("scores given for unknown dimension '" + s.dim_id +
                            "'");
    if (!by_id.emplace(s.dim_id, &s).second)
      throw ValidationError("duplicate scores for dimension '" + s.dim_id + "'");
  }
  std::vector<ImportanceVector> vectors;
  vectors.reserve(arch.dim_count());
  for (const auto& d : arch.dims()) {
    auto it = by_id.find(d.id);
    if (it == by_id.end())
      throw ValidationError("missing scores for dimension '" + d.id + "'");
    vectors.push_back(build_importance_vector(*it->second, d));
  }
  return ImportanceSet(std::move(vectors));
}

double block_importance(const Assignment& assignment,
                        const ImportanceSet& vectors,
                        const ArchitectureSpec& arch, std::size_t block) {
  double sum = 0.0;
  for (std::size_t di : arch.resolved()[block].dims)
    sum += vectors[di].values[assignment.omega[di] - 1];
  return sum;
}

double objective_value(const Assignment& assignment,
                       const ImportanceSet& vectors,
                       const ArchitectureSpec& arch) {
  check_assignment(arch, assignment);
  if (vectors.size() != arch.dim_count())
    throw ValidationError("importance vectors missing for some dimensions");
  double total = 0.0;
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    if (assignment.kappa[b])
      total += block_importance(assignment, vectors, arch, b);
  return total;
}

// ---------------------------------------------------------------------------
// Scores file: either a bare list of {dim_id, scores} or an object
// {"scores": [...], "manifest_sha256": "..."}.

ScoreSet parse_scores(std::string_view document) {
  using namespace detail;
  const Json root = parse_document(document, "scores");
  const Json* list = &root;
  std::string base = "$";
  if (root.is_object()) {
    check_keys(root, "$", {"scores", "manifest_sha256"});
    list = &member(root, "$", "scores");
    base = "$.scores";
  }
  require_array(*list, base);

  ScoreSet out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const std::string p = index_path(base, i);
    const Json& e = (*list)[i];
    require_object(e, p);
    check_keys(e, p, {"dim_id", "scores"});
    RawScores r;
    r.dim_id = get_string(member(e, p, "dim_id"), p + ".dim_id");
    if (!seen.insert(r.dim_id).second)
      throw ValidationError(p + ": duplicate dimension '" + r.dim_id + "'");
    const Json& values = member(e, p, "scores");
    require_array(values, p + ".scores");
    r.scores.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      const std::string vp = index_path(p + ".scores", k);
      if (!values[k].is_number())
        throw ValidationError(vp + ": expected a number (dimension '" +
                              r.dim_id + "', element " + std::to_string(k) +
                              ")");
      const double v = values[k].get<double>();
      if (!std::isfinite(v))
        throw ValidationError(vp + ": non-finite score (dimension '" +
                              r.dim_id + "', element " + std::to_string(k) +
                              ")");
      r.scores.push_back(v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

ScoreSet load_scores(const std::string& path) {
  try {
    return parse_scores(detail::read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string serialize_scores(const ScoreSet& scores,
                             const std::string& manifest_sha256) {
  using detail::Json;
  Json list = Json::array();
  for (const auto& s : scores)
    list.push_back({{"dim_id", s.dim_id}, {"scores", s.scores}});
  Json root = {{"scores", std::move(list)}};
  if (!manifest_sha256.empty()) root["manifest_sha256"] = manifest_sha256;
  return root.dump(1) + "\n";
}

ScoreSet synth_scores(const ArchitectureSpec& arch, std::uint64_t seed,
                      ScoreDistribution distribution) {
  ScoreSet out;
  out.reserve(arch.dim_count());
  for (std::size_t i = 0; i < arch.dim_count(); ++i) {
    const auto& d = arch.dims()[i];
    detail::Rng rng(detail::mix_seed(seed, i));
    RawScores r{d.id, {}};
    r.scores.reserve(d.max_elements);
    for (int k = 0; k < d.max_elements; ++k)
      r.scores.push_back(distribution == ScoreDistribution::uniform01
                             ? rng.uniform()
                             : rng.exponential());
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mdp
