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
#include <random>

#include "mdprune/importance.hpp"
#include "mdprune/solver.hpp"
#include "support/errors.hpp"
#include "support/instances.hpp"

using namespace mdp;
using mdp::testing::catch_error;
using mdp::testing::contains;

namespace {

ImportanceVector vec(std::vector<double> scores, int group, int options) {
  const DimensionSpec d{"d", DimRole::conv_out, options, group, static_cast<int>(scores.size())};
  return build_importance_vector({"d", std::move(scores)}, d);
}

ArchitectureSpec two_dim_block(bool removable) {
  return ArchitectureSpec::create(
      "x",
      {{"in", DimRole::fixed_external, 1, 1, 1},
       {"a", DimRole::conv_out, 3, 1, 3},
       {"b", DimRole::conv_out, 2, 2, 4}},
      {{1, BlockKind::cnn_chain, {"a", "b"}, removable, std::string("in")}});
}

}  // namespace

TEST_CASE("importance vectors are prefix sums over the descending ranking") {
  using doctest::Approx;
  const auto v1 = vec({0.2, 0.9, 0.5}, 1, 3);
  REQUIRE(v1.values.size() == 3);
  CHECK(v1.values[0] == Approx(0.9).epsilon(1e-15));
  CHECK(v1.values[1] == Approx(1.4).epsilon(1e-15));
  CHECK(v1.values[2] == Approx(1.6).epsilon(1e-15));

  const auto v2 = vec({1, 1, 1, 1}, 2, 2);
  CHECK(v2.values == std::vector<double>{2, 4});

  const auto v3 = vec({0.5, -0.1}, 1, 2);
  CHECK(v3.values[0] == 0.5);
  CHECK(v3.values[1] == Approx(0.4).epsilon(1e-15));
  CHECK(v3.values[1] < v3.values[0]);
}

TEST_CASE("grouped options clamp the last group") {
  const auto v = vec({5, 4, 3, 2, 1}, 2, 3);
  CHECK(v.values == std::vector<double>{9, 14, 15});
}

TEST_CASE("ranking breaks ties by original index") {
  const auto order = rank_elements({0.5, 0.7, 0.5, 0.7});
  CHECK(order == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("nonnegative scores give nondecreasing vectors") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const int n = testing::draw_int(rng, 1, 40);
    const int g = testing::draw_int(rng, 1, 8);
    std::vector<double> s;
    for (int i = 0; i < n; ++i) s.push_back(testing::draw(rng, 0, 1));
    const auto v = vec(s, g, (n + g - 1) / g);
    for (std::size_t j = 1; j < v.values.size(); ++j) CHECK(v.values[j] >= v.values[j - 1]);
    CHECK(v.values.back() == doctest::Approx(std::accumulate(s.begin(), s.end(), 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("objective is gated by the block flag") {
  const auto arch = two_dim_block(true);
  ScoreSet scores{{"in", {1.0}}, {"a", {0.2, 0.9, 0.5}}, {"b", {1, 1, 0.5, 0.5}}};
  const auto vectors = build_importance_set(arch, scores);
  Assignment a = full_assignment(arch);
  a.omega[arch.dim_index("a")] = 2;  // 1.4
  a.omega[arch.dim_index("b")] = 1;  // 2.0
  CHECK(objective_value(a, vectors, arch) == doctest::Approx(3.4).epsilon(1e-15));
  a.kappa[0] = 0;
  CHECK(objective_value(a, vectors, arch) == 0.0);
}

TEST_CASE("objective matches an independent summation on random instances") {
  std::mt19937_64 rng(5);
  testing::InstanceShape shape;
  shape.max_states = 5000;
  for (int t = 0; t < 60; ++t) {
    const auto inst = testing::random_instance(rng, shape);
    testing::for_each_assignment(inst.arch, [&](const Assignment& a) {
      const double ref = testing::reference_objective(inst, a);
      const double got = objective_value(a, inst.vectors, inst.arch);
      CHECK(std::fabs(got - ref) <= 1e-12 * std::max(1.0, std::fabs(ref)));
    });
  }
}

TEST_CASE("assignments are checked against the architecture") {
  const auto arch = two_dim_block(false);
  Assignment a = full_assignment(arch);
  a.omega[arch.dim_index("a")] = 4;
  CHECK(catch_error([&] { check_assignment(arch, a); }));
  a = full_assignment(arch);
  a.kappa[0] = 0;
  const auto err = catch_error([&] { check_assignment(arch, a); });
  REQUIRE(err);
  CHECK(contains(err->message, "removable"));
  a = full_assignment(arch);
  a.omega.pop_back();
  CHECK(catch_error([&] { check_assignment(arch, a); }));
}

TEST_CASE("score files") {
  SUBCASE("one dimension") {
    const auto s = parse_scores(R"([{"dim_id": "a", "scores": [0.1, 0.2, 0.3]}])");
    REQUIRE(s.size() == 1);
    CHECK(s[0].dim_id == "a");
    CHECK(s[0].scores.size() == 3);
  }
  SUBCASE("duplicate dimension is named") {
    const auto err = catch_error([] {
      parse_scores(R"([{"dim_id": "a", "scores": [1]}, {"dim_id": "a", "scores": [2]}])");
    });
    REQUIRE(err);
    CHECK(err->kind == ErrorKind::validation);
    CHECK(contains(err->message, "'a'"));
  }
  SUBCASE("out-of-range number is a validation error") {
    const auto err = catch_error([] {
      parse_scores(R"({"scores": [{"dim_id": "a", "scores": [1, 2, 1e999]}]})");
    });
    REQUIRE(err);
    CHECK(err->kind == ErrorKind::validation);
    CHECK(contains(err->message, "1e999"));
  }
  SUBCASE("non-numeric value reports the element index") {
    const auto err = catch_error([] {
      parse_scores(R"({"scores": [{"dim_id": "a", "scores": [1, 2, "x"]}]})");
    });
    REQUIRE(err);
    CHECK(contains(err->message, "[2]"));
  }
  SUBCASE("round trip") {
    const ScoreSet s{{"a", {0.1, -2.5, 3e-17}}, {"b", {1}}};
    CHECK(parse_scores(serialize_scores(s, "abc")) == s);
  }
  SUBCASE("wrong length for the dimension") {
    const auto arch = two_dim_block(false);
    const auto err = catch_error([&] {
      build_importance_set(arch, {{"in", {1}}, {"a", {1, 2}}, {"b", {1, 2, 3, 4}}});
    });
    REQUIRE(err);
    CHECK(contains(err->message, "'a'"));
  }
  SUBCASE("missing dimension") {
    const auto arch = two_dim_block(false);
    CHECK(catch_error([&] { build_importance_set(arch, {{"in", {1}}, {"a", {1, 2, 3}}}); }));
  }
}

TEST_CASE("synthetic scores") {
  std::vector<DimensionSpec> dims{{"in", DimRole::fixed_external, 1, 1, 1},
                                  {"a", DimRole::conv_out, 100, 100, 10000}};
  const auto arch = ArchitectureSpec::create("s", dims, {{1, BlockKind::cnn_chain, {"a"}, false, std::string("in")}});
  SUBCASE("same seed, same scores") {
    CHECK(synth_scores(arch, 3, ScoreDistribution::uniform01) ==
          synth_scores(arch, 3, ScoreDistribution::uniform01));
    CHECK_FALSE(synth_scores(arch, 3, ScoreDistribution::uniform01) ==
                synth_scores(arch, 4, ScoreDistribution::uniform01));
  }
  SUBCASE("uniform values lie in [0, 1)") {
    for (const auto& r : synth_scores(arch, 9, ScoreDistribution::uniform01))
      for (double x : r.scores) CHECK((x >= 0.0 && x < 1.0));
  }
  SUBCASE("exponential sample mean is close to one") {
    const auto s = synth_scores(arch, 21, ScoreDistribution::exponential);
    const auto& a = s[arch.dim_index("a")].scores;
    REQUIRE(a.size() == 10000);
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    CHECK(std::fabs(mean - 1.0) < 0.05);
  }
}
