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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "mdprune/mdprune.h"

namespace {

const std::string kTiny = MDPRUNE_DATA_DIR "/tiny/";

std::string take(char* s) {
  std::string out = s ? s : "";
  mdp_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("bundle, solve and reports through the C interface") {
  mdp_bundle* bundle = nullptr;
  REQUIRE(mdp_bundle_open((kTiny + "arch.json").c_str(), (kTiny + "scores.json").c_str(),
                          (kTiny + "lut.json").c_str(), 0.06, &bundle) == MDP_OK);
  char* count = nullptr;
  REQUIRE(mdp_bundle_subnetwork_count(bundle, &count) == MDP_OK);
  CHECK(take(count) == "1300");

  mdp_config cfg;
  mdp_config_default(&cfg);
  CHECK(cfg.mode == MDP_MODE_BRANCH_AND_BOUND);
  mdp_solution* sol = nullptr;
  REQUIRE(mdp_solve(bundle, &cfg, &sol) == MDP_OK);
  CHECK(mdp_solution_status(sol) == MDP_SOLVE_OPTIMAL);
  CHECK(mdp_solution_latency(sol) <= 0.06);

  cfg.mode = MDP_MODE_EXHAUSTIVE;
  mdp_solution* ex = nullptr;
  REQUIRE(mdp_solve(bundle, &cfg, &ex) == MDP_OK);
  CHECK(mdp_solution_importance(ex) == mdp_solution_importance(sol));
  CHECK(mdp_solution_node_count(ex) == 1300);

  char* json = nullptr;
  REQUIRE(mdp_solution_report(bundle, sol, &cfg, "abc", &json) == MDP_OK);
  CHECK(take(json).find("\"abc\"") != std::string::npos);
  char *structure = nullptr, *text = nullptr;
  REQUIRE(mdp_solution_extract(bundle, sol, nullptr, &structure, &text, nullptr) == MDP_OK);
  CHECK(take(structure).find("\"blocks\"") != std::string::npos);
  CHECK(take(text).find("depth:") != std::string::npos);

  mdp_bundle* tight = nullptr;
  REQUIRE(mdp_bundle_with_budget(bundle, 1e-6, &tight) == MDP_OK);
  mdp_solution* none = nullptr;
  CHECK(mdp_solve(tight, &cfg, &none) == MDP_INFEASIBLE);
  CHECK(none != nullptr);
  CHECK(std::strlen(mdp_last_error()) > 0);
  CHECK(mdp_solution_status(none) == MDP_SOLVE_INFEASIBLE);

  mdp_solution_free(none);
  mdp_solution_free(ex);
  mdp_solution_free(sol);
  mdp_bundle_free(tight);
  mdp_bundle_free(bundle);
}

TEST_CASE("errors map to status codes") {
  mdp_bundle* bundle = nullptr;
  CHECK(mdp_bundle_open("/nonexistent.json", "a", "b", 1.0, &bundle) == MDP_IO);
  CHECK(bundle == nullptr);
  CHECK(std::string(mdp_last_error()).find("nonexistent") != std::string::npos);
  CHECK(mdp_bundle_open(nullptr, "a", "b", 1.0, &bundle) == MDP_INVALID_ARGUMENT);
  CHECK(mdp_bundle_open((kTiny + "arch.json").c_str(), (kTiny + "scores.json").c_str(),
                        (kTiny + "lut.json").c_str(), -1.0, &bundle) == MDP_INVALID_ARGUMENT);
  CHECK(mdp_bundle_open((kTiny + "arch.json").c_str(), (kTiny + "lut.json").c_str(),
                        (kTiny + "lut.json").c_str(), 1.0, &bundle) == MDP_VALIDATION);

  char* report = nullptr;
  CHECK(mdp_check((kTiny + "arch.json").c_str(), (kTiny + "scores.json").c_str(),
                  (kTiny + "lut.json").c_str(), &report) == MDP_OK);
  CHECK(take(report).find("OK") != std::string::npos);

  // Sticky nothing: a successful call clears the message.
  char* hex = nullptr;
  REQUIRE(mdp_sha256_buffer("abc", 3, &hex) == MDP_OK);
  CHECK(take(hex) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(std::string(mdp_last_error()).empty());
}

TEST_CASE("synthesis through the C interface is deterministic") {
  mdp_cost_params p;
  mdp_cost_params_default(&p);
  char *s1 = nullptr, *l1 = nullptr, *s2 = nullptr, *l2 = nullptr;
  REQUIRE(mdp_synth((kTiny + "arch.json").c_str(), 9, MDP_SCORES_EXPONENTIAL, &p, nullptr, &s1, &l1) == MDP_OK);
  REQUIRE(mdp_synth((kTiny + "arch.json").c_str(), 9, MDP_SCORES_EXPONENTIAL, &p, nullptr, &s2, &l2) == MDP_OK);
  CHECK(take(s1) == take(s2));
  CHECK(take(l1) == take(l2));
  CHECK(mdp_synth((kTiny + "arch.json").c_str(), 9, 42, &p, nullptr, &s1, &l1) == MDP_INVALID_ARGUMENT);
}
