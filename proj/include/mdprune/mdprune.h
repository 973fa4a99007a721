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

/* C interface to the mdprune solver.
 *
 * Every function returns an mdp_status. On failure the message is available
 * from mdp_last_error() on the calling thread until the next call. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with mdp_string_free(). */

#ifndef MDPRUNE_H
#define MDPRUNE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MDP_BUILDING_LIBRARY)
#    define MDP_API __declspec(dllexport)
#  else
#    define MDP_API __declspec(dllimport)
#  endif
#else
#  define MDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdp_status {
  MDP_OK = 0,
  MDP_INFEASIBLE = 2,
  MDP_VALIDATION = 3,
  MDP_IO = 4,
  MDP_INVALID_ARGUMENT = 5,
  MDP_LIMIT = 6,
  MDP_INTERNAL = 7
} mdp_status;

typedef enum mdp_mode {
  MDP_MODE_EXHAUSTIVE = 0,
  MDP_MODE_BRANCH_AND_BOUND = 1,
  MDP_MODE_HEURISTIC_ONLY = 2
} mdp_mode;

typedef enum mdp_solve_status {
  MDP_SOLVE_OPTIMAL = 0,
  MDP_SOLVE_FEASIBLE_HEURISTIC = 1,
  MDP_SOLVE_INFEASIBLE = 2
} mdp_solve_status;

typedef enum mdp_score_dist {
  MDP_SCORES_UNIFORM = 0,
  MDP_SCORES_EXPONENTIAL = 1
} mdp_score_dist;

typedef struct mdp_config {
  int mode;            /* mdp_mode */
  double time_limit;   /* seconds, > 0 */
  int lambda_iters;
  double tolerance;    /* absolute optimality gap */
  uint64_t seed;
  int threads;
} mdp_config;

typedef struct mdp_cost_params {
  double unit_cost;
  double overhead;
  int tile;
  double spatial;
  double noise;
} mdp_cost_params;

/* Architecture, scores, tables and budget, validated together. */
typedef struct mdp_bundle mdp_bundle;
typedef struct mdp_solution mdp_solution;

MDP_API const char* mdp_last_error(void);
MDP_API void mdp_string_free(char* s);
MDP_API const char* mdp_version(void);

MDP_API void mdp_config_default(mdp_config* config);
MDP_API void mdp_cost_params_default(mdp_cost_params* params);

/* Lower-case hex SHA-256 of a file or a buffer. */
MDP_API mdp_status mdp_sha256_file(const char* path, char** hex);
MDP_API mdp_status mdp_sha256_buffer(const char* data, size_t size, char** hex);

/* Synthetic scores and tables for an architecture file. Outputs are JSON
 * documents stamped with `manifest_sha256` (may be NULL). */
MDP_API mdp_status mdp_synth(const char* arch_path, uint64_t seed,
                             int score_dist, const mdp_cost_params* params,
                             const char* manifest_sha256, char** scores_json,
                             char** lut_json);

/* Runs every validator on the given files (scores and lut may be NULL).
 * `report` receives one line per check. */
MDP_API mdp_status mdp_check(const char* arch_path, const char* scores_path,
                             const char* lut_path, char** report);

/* budget_ms may be +inf. */
MDP_API mdp_status mdp_bundle_open(const char* arch_path,
                                   const char* scores_path,
                                   const char* lut_path, double budget_ms,
                                   mdp_bundle** out);
/* Same inputs, different budget. */
MDP_API mdp_status mdp_bundle_with_budget(const mdp_bundle* bundle,
                                          double budget_ms, mdp_bundle** out);
MDP_API void mdp_bundle_free(mdp_bundle* bundle);
MDP_API mdp_status mdp_bundle_subnetwork_count(const mdp_bundle* bundle,
                                               char** decimal);
MDP_API mdp_status mdp_bundle_min_latency(const mdp_bundle* bundle,
                                          double* latency_ms);

/* MDP_INFEASIBLE is returned, with *out still set, when no assignment
 * meets the budget. */
MDP_API mdp_status mdp_solve(const mdp_bundle* bundle,
                             const mdp_config* config, mdp_solution** out);
/* Reads a report written by mdp_solution_report. */
MDP_API mdp_status mdp_solution_load(const mdp_bundle* bundle,
                                     const char* report_path,
                                     mdp_solution** out);
MDP_API void mdp_solution_free(mdp_solution* solution);

MDP_API int mdp_solution_status(const mdp_solution* solution);
MDP_API double mdp_solution_importance(const mdp_solution* solution);
MDP_API double mdp_solution_latency(const mdp_solution* solution);
MDP_API double mdp_solution_bound(const mdp_solution* solution);
MDP_API uint64_t mdp_solution_node_count(const mdp_solution* solution);
MDP_API double mdp_solution_wall_time(const mdp_solution* solution);
MDP_API const char* mdp_solution_message(const mdp_solution* solution);

MDP_API mdp_status mdp_solution_report(const mdp_bundle* bundle,
                                       const mdp_solution* solution,
                                       const mdp_config* config,
                                       const char* manifest_sha256,
                                       char** json);
MDP_API mdp_status mdp_solution_assignment_csv(const mdp_bundle* bundle,
                                               const mdp_solution* solution,
                                               char** csv);
/* Pruned structure (JSON) with its text summary and width-profile CSV. */
MDP_API mdp_status mdp_solution_extract(const mdp_bundle* bundle,
                                        const mdp_solution* solution,
                                        const char* manifest_sha256,
                                        char** structure_json,
                                        char** summary_text,
                                        char** summary_csv);

/* Linear single-row latency model against full table lookups along a
 * pruning trajectory. The trajectory comes from `trajectory_path` or, when
 * that is NULL, from `uniform_steps` even shrink steps. */
MDP_API mdp_status mdp_compare_latency_models(const char* arch_path,
                                              const char* lut_path,
                                              const char* trajectory_path,
                                              int uniform_steps,
                                              const char* manifest_sha256,
                                              char** csv);

#ifdef __cplusplus
}
#endif

#endif /* MDPRUNE_H */
