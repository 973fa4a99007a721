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

#include "mdprune/mdprune.h"

#include <cmath>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>

#include "json_util.hpp"
#include "mdprune/extract.hpp"
#include "mdprune/sha256.hpp"
#include "mdprune/solver.hpp"
#include "mdprune/validate.hpp"

struct mdp_bundle {
  mdp::ScoreSet scores;
  mdp::PruningProblem problem;
};

struct mdp_solution {
  mdp::PruningSolution solution;
};

namespace {

thread_local std::string g_last_error;

mdp_status fail(mdp_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
mdp_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const mdp::Error& e) {
    return fail(static_cast<mdp_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MDP_LIMIT, "out of memory");
  } catch (const std::exception& e) {
    return fail(MDP_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) throw mdp::ArgumentError(std::string(what) + " must not be NULL");
}

mdp::SolverConfig to_config(const mdp_config* c) {
  mdp::SolverConfig out;
  if (!c) return out;
  switch (c->mode) {
    case MDP_MODE_EXHAUSTIVE: out.mode = mdp::SolveMode::exhaustive; break;
    case MDP_MODE_BRANCH_AND_BOUND: out.mode = mdp::SolveMode::branch_and_bound; break;
    case MDP_MODE_HEURISTIC_ONLY: out.mode = mdp::SolveMode::heuristic_only; break;
    default: throw mdp::ArgumentError("unknown solver mode " + std::to_string(c->mode));
  }
  out.time_limit = c->time_limit;
  out.lambda_iters = c->lambda_iters;
  out.tolerance = c->tolerance;
  out.rng_seed = c->seed;
  out.threads = c->threads;
  return out;
}

std::string stamp(const char* manifest) { return manifest ? manifest : ""; }

}  // namespace

extern "C" {

const char* mdp_last_error(void) { return g_last_error.c_str(); }

void mdp_string_free(char* s) { std::free(s); }

const char* mdp_version(void) { return "1.0.0"; }

void mdp_config_default(mdp_config* config) {
  if (!config) return;
  const mdp::SolverConfig d;
  config->mode = MDP_MODE_BRANCH_AND_BOUND;
  config->time_limit = d.time_limit;
  config->lambda_iters = d.lambda_iters;
  config->tolerance = d.tolerance;
  config->seed = d.rng_seed;
  config->threads = d.threads;
}

void mdp_cost_params_default(mdp_cost_params* params) {
  if (!params) return;
  const mdp::LatencyModelParams d;
  params->unit_cost = d.unit_cost;
  params->overhead = d.overhead;
  params->tile = d.tile;
  params->spatial = d.spatial;
  params->noise = d.noise;
}

mdp_status mdp_sha256_file(const char* path, char** hex) {
  return guarded([&] {
    need(path, "path");
    need(hex, "hex");
    *hex = dup(mdp::sha256_hex(mdp::detail::read_file(path)));
    return MDP_OK;
  });
}

mdp_status mdp_sha256_buffer(const char* data, size_t size, char** hex) {
  return guarded([&] {
    if (size > 0) need(data, "data");
    need(hex, "hex");
    *hex = dup(mdp::sha256_hex(std::string_view(data ? data : "", size)));
    return MDP_OK;
  });
}

mdp_status mdp_synth(const char* arch_path, uint64_t seed, int score_dist,
                     const mdp_cost_params* params, const char* manifest_sha256,
                     char** scores_json, char** lut_json) {
  return guarded([&] {
    need(arch_path, "arch_path");
    need(scores_json, "scores_json");
    need(lut_json, "lut_json");
    const auto arch = mdp::load_architecture(arch_path);
    mdp::ScoreDistribution dist;
    switch (score_dist) {
      case MDP_SCORES_UNIFORM: dist = mdp::ScoreDistribution::uniform01; break;
      case MDP_SCORES_EXPONENTIAL: dist = mdp::ScoreDistribution::exponential; break;
      default: throw mdp::ArgumentError("unknown score distribution");
    }
    mdp::LatencyModelParams p;
    if (params) {
      p.unit_cost = params->unit_cost;
      p.overhead = params->overhead;
      p.tile = params->tile;
      p.spatial = params->spatial;
      p.noise = params->noise;
    }
    const std::string m = stamp(manifest_sha256);
    std::string scores = mdp::serialize_scores(mdp::synth_scores(arch, seed, dist), m);
    std::string lut = mdp::serialize_lut(mdp::synth_lut(arch, p, seed), mdp::PayloadEncoding::text, m);
    *scores_json = dup(scores);
    *lut_json = dup(lut);
    return MDP_OK;
  });
}

mdp_status mdp_check(const char* arch_path, const char* scores_path,
                     const char* lut_path, char** report) {
  return guarded([&] {
    need(arch_path, "arch_path");
    need(report, "report");
    std::ostringstream out;
    mdp_status worst = MDP_OK;
    auto record = [&](const std::string& what, auto&& fn) -> bool {
      try {
        fn();
        out << what << ": OK\n";
        return true;
      } catch (const mdp::Error& e) {
        out << what << ": FAIL: " << e.what() << '\n';
        const auto s = static_cast<mdp_status>(e.kind());
        if (worst == MDP_OK || s == MDP_IO) worst = s == MDP_IO ? MDP_IO : MDP_VALIDATION;
        return false;
      }
    };

    std::optional<mdp::ArchitectureSpec> arch;
    std::optional<mdp::ScoreSet> scores;
    std::optional<mdp::LatencyTableSet> tables;
    record(std::string("arch ") + arch_path, [&] { arch = mdp::load_architecture(arch_path); });
    if (scores_path)
      record(std::string("scores ") + scores_path, [&] { scores = mdp::load_scores(scores_path); });
    if (lut_path)
      record(std::string("lut ") + lut_path, [&] { tables = mdp::load_lut(lut_path); });
    if (arch) {
      std::optional<mdp::ImportanceSet> vectors;
      if (scores)
        record("importance vectors", [&] { vectors = mdp::build_importance_set(*arch, *scores); });
      if (tables) {
        if (vectors)
          record("shapes", [&] { mdp::validate_problem_shapes(*arch, *tables, *vectors); });
        else
          record("table shapes", [&] { mdp::validate_table_shapes(*arch, *tables); });
      }
    }
    out << (worst == MDP_OK ? "OK" : "FAILED") << '\n';
    *report = dup(out.str());
    if (worst != MDP_OK) g_last_error = "validation failed";
    return worst;
  });
}

mdp_status mdp_bundle_open(const char* arch_path, const char* scores_path,
                           const char* lut_path, double budget_ms,
                           mdp_bundle** out) {
  return guarded([&] {
    need(arch_path, "arch_path");
    need(scores_path, "scores_path");
    need(lut_path, "lut_path");
    need(out, "out");
    *out = nullptr;
    auto arch = mdp::load_architecture(arch_path);
    auto scores = mdp::load_scores(scores_path);
    auto tables = mdp::load_lut(lut_path);
    auto vectors = mdp::build_importance_set(arch, scores);
    auto problem = mdp::assemble(std::move(arch), std::move(vectors),
                                 std::move(tables), budget_ms);
    *out = new mdp_bundle{std::move(scores), std::move(problem)};
    return MDP_OK;
  });
}

mdp_status mdp_bundle_with_budget(const mdp_bundle* bundle, double budget_ms,
                                  mdp_bundle** out) {
  return guarded([&] {
    need(bundle, "bundle");
    need(out, "out");
    *out = nullptr;
    const auto& p = bundle->problem;
    auto problem = mdp::assemble(p.arch(), p.vectors(), p.tables(), budget_ms);
    *out = new mdp_bundle{bundle->scores, std::move(problem)};
    return MDP_OK;
  });
}

void mdp_bundle_free(mdp_bundle* bundle) { delete bundle; }

mdp_status mdp_bundle_subnetwork_count(const mdp_bundle* bundle, char** decimal) {
  return guarded([&] {
    need(bundle, "bundle");
    need(decimal, "decimal");
    *decimal = dup(mdp::subnetwork_count(bundle->problem.arch()).str());
    return MDP_OK;
  });
}

mdp_status mdp_bundle_min_latency(const mdp_bundle* bundle, double* latency_ms) {
  return guarded([&] {
    need(bundle, "bundle");
    need(latency_ms, "latency_ms");
    *latency_ms = bundle->problem.min_total_latency();
    return MDP_OK;
  });
}

mdp_status mdp_solve(const mdp_bundle* bundle, const mdp_config* config,
                     mdp_solution** out) {
  return guarded([&] {
    need(bundle, "bundle");
    need(out, "out");
    *out = nullptr;
    auto sol = mdp::solve(bundle->problem, to_config(config));
    const bool infeasible = sol.status == mdp::SolveStatus::infeasible;
    if (infeasible) g_last_error = sol.message;
    *out = new mdp_solution{std::move(sol)};
    return infeasible ? MDP_INFEASIBLE : MDP_OK;
  });
}

mdp_status mdp_solution_load(const mdp_bundle* bundle, const char* report_path,
                             mdp_solution** out) {
  return guarded([&] {
    need(bundle, "bundle");
    need(report_path, "report_path");
    need(out, "out");
    *out = nullptr;
    auto sol = mdp::parse_solution_report(mdp::detail::read_file(report_path),
                                          bundle->problem);
    *out = new mdp_solution{std::move(sol)};
    return MDP_OK;
  });
}

void mdp_solution_free(mdp_solution* solution) { delete solution; }

int mdp_solution_status(const mdp_solution* s) {
  if (!s) return MDP_SOLVE_INFEASIBLE;
  switch (s->solution.status) {
    case mdp::SolveStatus::optimal: return MDP_SOLVE_OPTIMAL;
    case mdp::SolveStatus::feasible_heuristic: return MDP_SOLVE_FEASIBLE_HEURISTIC;
    case mdp::SolveStatus::infeasible: break;
  }
  return MDP_SOLVE_INFEASIBLE;
}

double mdp_solution_importance(const mdp_solution* s) {
  return s ? s->solution.importance : NAN;
}
double mdp_solution_latency(const mdp_solution* s) {
  return s ? s->solution.latency : NAN;
}
double mdp_solution_bound(const mdp_solution* s) {
  return s ? s->solution.bound : NAN;
}
uint64_t mdp_solution_node_count(const mdp_solution* s) {
  return s ? s->solution.node_count : 0;
}
double mdp_solution_wall_time(const mdp_solution* s) {
  return s ? s->solution.wall_time : NAN;
}
const char* mdp_solution_message(const mdp_solution* s) {
  return s ? s->solution.message.c_str() : "";
}

mdp_status mdp_solution_report(const mdp_bundle* bundle,
                               const mdp_solution* solution,
                               const mdp_config* config,
                               const char* manifest_sha256, char** json) {
  return guarded([&] {
    need(bundle, "bundle");
    need(solution, "solution");
    need(json, "json");
    *json = dup(mdp::solution_report_json(bundle->problem, solution->solution,
                                          to_config(config), stamp(manifest_sha256)));
    return MDP_OK;
  });
}

mdp_status mdp_solution_assignment_csv(const mdp_bundle* bundle,
                                       const mdp_solution* solution, char** csv) {
  return guarded([&] {
    need(bundle, "bundle");
    need(solution, "solution");
    need(csv, "csv");
    *csv = dup(mdp::assignment_csv(bundle->problem.arch(), solution->solution.assignment));
    return MDP_OK;
  });
}

mdp_status mdp_solution_extract(const mdp_bundle* bundle,
                                const mdp_solution* solution,
                                const char* manifest_sha256,
                                char** structure_json, char** summary_text,
                                char** summary_csv) {
  return guarded([&] {
    need(bundle, "bundle");
    need(solution, "solution");
    const std::string m = stamp(manifest_sha256);
    const auto structure =
        mdp::extract_structure(solution->solution, bundle->problem, bundle->scores);
    const auto summary = mdp::summarize(structure, m);
    std::string js = mdp::structure_json(structure, m);
    if (structure_json) *structure_json = dup(js);
    if (summary_text) *summary_text = dup(summary.text);
    if (summary_csv) *summary_csv = dup(summary.csv);
    return MDP_OK;
  });
}

mdp_status mdp_compare_latency_models(const char* arch_path,
                                      const char* lut_path,
                                      const char* trajectory_path,
                                      int uniform_steps,
                                      const char* manifest_sha256, char** csv) {
  return guarded([&] {
    need(arch_path, "arch_path");
    need(lut_path, "lut_path");
    need(csv, "csv");
    const auto arch = mdp::load_architecture(arch_path);
    const auto tables = mdp::load_lut(lut_path);
    mdp::validate_table_shapes(arch, tables);
    const auto trajectory =
        trajectory_path
            ? mdp::parse_trajectory(mdp::detail::read_file(trajectory_path), arch)
            : mdp::uniform_trajectory(arch, uniform_steps);
    const auto report = mdp::replay_trajectory(trajectory, tables, arch);

    std::ostringstream out;
    out.precision(17);
    if (manifest_sha256) out << "# manifest_sha256: " << manifest_sha256 << '\n';
    out << "step,block_id,layer,p_prev,p_hat,j,true_ms,linear_ms,epsilon,bound,"
           "step_true_ms,step_linear_ms,step_gap_ms\n";
    for (std::size_t s = 0; s < report.steps.size(); ++s) {
      const auto& st = report.steps[s];
      if (st.layers.empty())
        out << s << ",,,,,,,,,," << st.true_latency << ',' << st.linear_estimate
            << ',' << st.gap << '\n';
      for (const auto& l : st.layers)
        out << s << ',' << l.block_id << ',' << l.layer << ',' << l.p_prev << ','
            << l.p_hat << ',' << l.j << ',' << l.true_latency << ','
            << l.linear_latency << ',' << l.epsilon << ',' << l.bound << ','
            << st.true_latency << ',' << st.linear_estimate << ',' << st.gap
            << '\n';
    }
    *csv = dup(out.str());
    return MDP_OK;
  });
}

}  // extern "C"
