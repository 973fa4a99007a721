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

#include "mdprune/latency.hpp"
#include "mdprune/validate.hpp"
#include "support/errors.hpp"
#include "support/instances.hpp"

using namespace mdp;
using mdp::testing::catch_error;
using mdp::testing::contains;

namespace {

/// One cnn block: fixed input with `in_options` = 1, one conv layer with
/// `out` options, group 1.
ArchitectureSpec single_layer(int in_options, int out, bool removable = false) {
  std::vector<DimensionSpec> dims{{"in", DimRole::conv_out, in_options, 1, in_options},
                                  {"c", DimRole::conv_out, out, 1, out}};
  return ArchitectureSpec::create("one", dims,
                                  {{1, BlockKind::cnn_chain, {"c"}, removable, std::string("in")}});
}

LatencyTable conv_table(int block, int layer, std::vector<std::string> axes,
                        std::vector<std::vector<double>> rows) {
  LatencyTable t;
  t.block_id = block;
  t.part = TablePart::conv(layer);
  t.axes = std::move(axes);
  t.shape = {rows.size(), rows[0].size()};
  for (const auto& r : rows) t.data.insert(t.data.end(), r.begin(), r.end());
  return t;
}

/// Full block tensor built from the reference evaluation, independent of
/// embed_block_tensor.
BlockTensor reference_tensor(const testing::Instance& inst, std::size_t b) {
  const auto& dims = inst.arch.resolved()[b].dims;
  BlockTensor t;
  t.block = b;
  std::size_t n = 1;
  for (auto d : dims) {
    t.shape.push_back(inst.arch.dims()[d].option_count);
    n *= t.shape.back();
  }
  Assignment a = full_assignment(inst.arch);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rest = flat;
    for (std::size_t k = dims.size(); k-- > 0;) {
      a.omega[dims[k]] = static_cast<int>(rest % t.shape[k]) + 1;
      rest /= t.shape[k];
    }
    t.data.push_back(testing::reference_block_latency(inst, a, b));
  }
  return t;
}

}  // namespace

TEST_CASE("conv lookup picks the (input, output) entry") {
  const auto arch = single_layer(3, 3, true);
  LatencyTableSet tables({conv_table(1, 1, {"in", "c"}, {{1, 2, 3}, {2, 4, 6}, {3, 6, 9}})});
  // An input outside every block sits at its last option.
  Assignment a = full_assignment(arch);
  a.omega[arch.dim_index("c")] = 3;
  CHECK(constraint_value(a, tables, arch) == 9.0);

  const auto arch2 = single_layer(2, 3, true);
  LatencyTableSet tables2({conv_table(1, 1, {"in", "c"}, {{1, 2, 3}, {2, 4, 6}})});
  Assignment b = full_assignment(arch2);
  b.omega[arch2.dim_index("c")] = 3;
  CHECK(constraint_value(b, tables2, arch2) == 6.0);
  b.kappa[0] = 0;
  b.omega[arch2.dim_index("c")] = 1;
  CHECK(constraint_value(b, tables2, arch2) == 0.0);
}

TEST_CASE("one-hot selection picks exactly one tensor entry") {
  std::vector<DimensionSpec> dims{{"e", DimRole::emb, 2, 1, 2}, {"h", DimRole::head, 2, 1, 2},
                                  {"q", DimRole::qk, 2, 1, 2},  {"v", DimRole::v, 2, 1, 2},
                                  {"m", DimRole::mlp, 2, 1, 2}};
  const auto arch = ArchitectureSpec::create(
      "t", dims, {{1, BlockKind::transformer, {"e", "h", "q", "v", "m"}, true, std::nullopt}});
  BlockTensor t{0, {2, 2, 2, 2, 2}, {}};
  for (int i = 0; i < 32; ++i) t.data.push_back(std::ldexp(1.0, i));
  Assignment a = full_assignment(arch);
  a.omega = {2, 1, 2, 1, 1};
  const int flat = ((((1 * 2 + 0) * 2 + 1) * 2 + 0) * 2 + 0);
  CHECK(joint_constraint_value(a, {t}, arch) == std::ldexp(1.0, flat));
  a.kappa[0] = 0;
  a.omega = {1, 1, 1, 1, 1};
  CHECK(joint_constraint_value(a, {t}, arch) == 0.0);
}

TEST_CASE("decomposed latency equals the joint tensor form") {
  std::mt19937_64 rng(77);
  testing::InstanceShape shape;
  shape.quantize = false;
  shape.max_states = 20000;
  int checked = 0;
  for (int t = 0; t < 120; ++t) {
    const auto inst = testing::random_instance(rng, shape);
    std::vector<BlockTensor> ref, embedded;
    for (std::size_t b = 0; b < inst.arch.block_count(); ++b) {
      ref.push_back(reference_tensor(inst, b));
      embedded.push_back(embed_block_tensor(inst.arch, inst.tables, b));
      CHECK(embedded.back().data == ref.back().data);
    }
    testing::for_each_assignment(inst.arch, [&](const Assignment& a) {
      const double dec = constraint_value(a, inst.tables, inst.arch);
      const double joint = joint_constraint_value(a, ref, inst.arch);
      CHECK(std::fabs(dec - joint) <= 1e-12 * std::max(1.0, std::fabs(joint)));
      CHECK(std::fabs(dec - testing::reference_latency(inst, a)) <= 1e-12 * std::max(1.0, dec));
    });
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("synthetic tables follow the cost model") {
  SUBCASE("product form without tiling or noise") {
    const auto arch = single_layer(2, 2);
    LatencyModelParams p{1.0, 0.0, 1, 1.0, 0.0};
    const auto tables = synth_lut(arch, p, 0);
    const auto& t = tables.get(1, TablePart::conv(1));
    CHECK(t.data == std::vector<double>{1, 2, 2, 4});
  }
  SUBCASE("tiles make plateaus") {
    LatencyModelParams p{1.0, 0.0, 32, 1.0, 0.0};
    CHECK(synth_conv_cost(p, 10, 33) == synth_conv_cost(p, 10, 64));
    CHECK(synth_conv_cost(p, 10, 32) < synth_conv_cost(p, 10, 33));
  }
  SUBCASE("noise is reproducible per seed") {
    const auto arch = single_layer(3, 4);
    LatencyModelParams p;
    CHECK(synth_lut(arch, p, 5).tables() == synth_lut(arch, p, 5).tables());
    CHECK_FALSE(synth_lut(arch, p, 5).tables() == synth_lut(arch, p, 6).tables());
  }
  SUBCASE("invalid parameters") {
    const auto arch = single_layer(1, 2);
    CHECK(catch_error([&] { synth_lut(arch, {1.0, 0.0, 0, 1.0, 0.0}, 0); }));
    CHECK(catch_error([&] { synth_lut(arch, {1.0, 0.0, 1, 1.0, 1.5}, 0); }));
  }
}

TEST_CASE("per-channel cost of a table row") {
  const auto t = conv_table(1, 1, {"in", "c"}, {{1, 2, 3}, {2, 4, 6}, {3, 6, 9}});
  CHECK(linear_channel_cost(t, 2, 2) == 2.0);
  CHECK(linear_channel_cost(t, 2, 1) == 2.0);
  double sum = 0.0;
  for (int j = 1; j <= 3; ++j) sum += linear_channel_cost(t, 2, j);
  CHECK(sum == 6.0);
}

TEST_CASE("estimation error and its bound") {
  const auto t = conv_table(1, 1, {"in", "c"}, {{1, 2}, {2, 4}});
  const auto same = estimation_error(t, 2, 2, 2);
  CHECK(same.epsilon == 0.0);
  CHECK(same.bound == 0.0);
  const auto e = estimation_error(t, 2, 1, 2);
  CHECK(linear_channel_cost(t, 2, 2) == 2.0);
  CHECK(linear_channel_cost(t, 1, 2) == 1.0);
  CHECK(e.epsilon == 1.0);
  CHECK(e.bound == 3.0);
}

TEST_CASE("error never exceeds its bound on random monotone tables") {
  std::mt19937_64 rng(1234);
  int violations = 0, tables = 0;
  for (int n = 0; n < 1000; ++n) {
    const int rows = testing::draw_int(rng, 1, 6), cols = testing::draw_int(rng, 1, 6);
    std::vector<std::vector<double>> r(rows, std::vector<double>(cols));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const double up = i > 0 ? r[i - 1][j] : 0.0, left = j > 0 ? r[i][j - 1] : 0.0;
        r[i][j] = std::max(up, left) + testing::draw(rng, 0.0, 1.0);
      }
    const auto t = conv_table(1, 1, {"in", "c"}, r);
    ++tables;
    for (int p = 1; p <= rows; ++p)
      for (int ph = 1; ph <= p; ++ph)
        for (int j = 1; j <= cols; ++j) {
          const auto e = estimation_error(t, p, ph, j);
          if (!(e.epsilon <= e.bound)) ++violations;
        }
  }
  CHECK(tables == 1000);
  CHECK(violations == 0);
}

TEST_CASE("trajectory replay") {
  // in (2 elements, fixed) -> c1 (3 options) -> c2 (3 options), tile 1.
  std::vector<DimensionSpec> dims{{"in", DimRole::fixed_external, 1, 2, 2},
                                  {"c1", DimRole::conv_out, 3, 1, 3},
                                  {"c2", DimRole::conv_out, 3, 1, 3}};
  const auto arch = ArchitectureSpec::create(
      "chain", dims, {{1, BlockKind::cnn_chain, {"c1", "c2"}, false, std::string("in")}});
  const auto tables = synth_lut(arch, {1.0, 0.0, 1, 1.0, 0.0}, 0);
  auto step = [&](int a, int b) {
    Assignment s = full_assignment(arch);
    s.omega[arch.dim_index("c1")] = a;
    s.omega[arch.dim_index("c2")] = b;
    return s;
  };

  SUBCASE("shrinking both layers opens a gap") {
    const auto r = replay_trajectory({{step(3, 3), step(2, 2), step(1, 1)}}, tables, arch);
    REQUIRE(r.steps.size() == 3);
    CHECK(r.steps[0].true_latency == 15.0);
    CHECK(r.steps[0].gap == 0.0);
    CHECK(r.steps[1].true_latency == 8.0);
    CHECK(r.steps[1].linear_estimate == 10.0);
    CHECK(r.steps[1].gap == 2.0);
    CHECK(r.steps[2].true_latency == 3.0);
    CHECK(r.steps[2].linear_estimate == 4.0);
    CHECK(r.steps[2].gap == 1.0);
    for (const auto& s : r.steps)
      for (const auto& l : s.layers) CHECK(l.epsilon <= l.bound);
  }
  SUBCASE("pruning only the last layer keeps the estimate exact") {
    const auto r = replay_trajectory({{step(3, 3), step(3, 2), step(3, 1)}}, tables, arch);
    for (const auto& s : r.steps) CHECK(s.gap == 0.0);
  }
  SUBCASE("empty trajectory") {
    CHECK(replay_trajectory({}, tables, arch).steps.empty());
  }
  SUBCASE("widening is rejected") {
    CHECK(catch_error([&] { replay_trajectory({{step(2, 2), step(3, 2)}}, tables, arch); }));
  }
  SUBCASE("uniform trajectory ends at option 1") {
    const auto traj = uniform_trajectory(arch, 2);
    REQUIRE(traj.steps.size() == 3);
    CHECK(traj.steps.front() == step(3, 3));
    CHECK(traj.steps.back() == step(1, 1));
  }
}

TEST_CASE("transformer architectures are rejected by replay") {
  std::vector<DimensionSpec> dims{{"e", DimRole::emb, 1, 1, 1}, {"h", DimRole::head, 1, 1, 1},
                                  {"q", DimRole::qk, 1, 1, 1},  {"v", DimRole::v, 1, 1, 1},
                                  {"m", DimRole::mlp, 1, 1, 1}};
  const auto arch = ArchitectureSpec::create(
      "t", dims, {{1, BlockKind::transformer, {"e", "h", "q", "v", "m"}, false, std::nullopt}});
  const auto tables = synth_lut(arch, {}, 0);
  const auto err = catch_error([&] { replay_trajectory({{full_assignment(arch)}}, tables, arch); });
  REQUIRE(err);
  CHECK(contains(err->message, "transformer"));
}

TEST_CASE("table files") {
  const auto arch = single_layer(3, 4);
  const auto tables = synth_lut(arch, {}, 3);
  SUBCASE("text round trip is bit-identical") {
    CHECK(parse_lut(serialize_lut(tables)).tables() == tables.tables());
  }
  SUBCASE("base64 round trip is bit-identical") {
    const auto doc = serialize_lut(tables, PayloadEncoding::base64);
    CHECK(contains(doc, "base64"));
    CHECK(parse_lut(doc).tables() == tables.tables());
  }
  SUBCASE("negative entry names its index") {
    const auto err = catch_error([] {
      parse_lut(R"({"tables": [{"block_id": 1, "part": "conv_layer", "layer": 1,
        "axes": ["in", "c"], "shape": [1, 3], "data": [1, -2, 3]}]})");
    });
    REQUIRE(err);
    CHECK(contains(err->message, "data[1]"));
    CHECK(contains(err->message, "negative"));
  }
  SUBCASE("rank-3 data declared as a conv layer") {
    const auto err = catch_error([] {
      parse_lut(R"({"tables": [{"block_id": 1, "part": "conv_layer", "layer": 1,
        "axes": ["a", "b", "c"], "shape": [1, 1, 1], "data": [1]}]})");
    });
    REQUIRE(err);
    CHECK(err->kind == ErrorKind::validation);
    CHECK(contains(err->message, "rank-3"));
  }
  SUBCASE("duplicate table") {
    auto t = tables.tables();
    t.push_back(t.front());
    CHECK(catch_error([&] { LatencyTableSet dup(t); }));
  }
}

TEST_CASE("shape validation names the offending table and axis") {
  std::vector<DimensionSpec> dims{{"in", DimRole::conv_out, 5, 1, 5}, {"c", DimRole::conv_out, 8, 1, 8}};
  const auto arch = ArchitectureSpec::create(
      "s", dims, {{1, BlockKind::cnn_chain, {"c"}, false, std::string("in")}});
  std::vector<std::vector<double>> rows(4, std::vector<double>(8, 1.0));
  LatencyTableSet bad({conv_table(1, 1, {"in", "c"}, rows)});
  const auto err = catch_error([&] { validate_table_shapes(arch, bad); });
  REQUIRE(err);
  CHECK(contains(err->message, "axis 0"));
  CHECK(contains(err->message, "expected 5"));
  CHECK(contains(err->message, "found 4"));

  std::vector<DimensionSpec> tdims{{"e", DimRole::emb, 2, 1, 2}, {"h", DimRole::head, 2, 1, 2},
                                   {"q", DimRole::qk, 2, 1, 2},  {"v", DimRole::v, 2, 1, 2},
                                   {"m", DimRole::mlp, 2, 1, 2}};
  const auto tarch = ArchitectureSpec::create(
      "t", tdims, {{1, BlockKind::transformer, {"e", "h", "q", "v", "m"}, false, std::nullopt}});
  auto parts = synth_lut(tarch, {}, 0).tables();
  std::erase_if(parts, [](const LatencyTable& t) { return t.part == TablePart::mlp(); });
  const auto missing = catch_error([&] { validate_table_shapes(tarch, LatencyTableSet(parts)); });
  REQUIRE(missing);
  CHECK(contains(missing->message, "C^mlp"));

  CHECK_FALSE(catch_error([&] { validate_table_shapes(tarch, synth_lut(tarch, {}, 0)); }));
}
