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

#include "mdprune/arch.hpp"
#include "mdprune/error.hpp"
#include "support/errors.hpp"

using namespace mdp;
using mdp::testing::catch_error;
using mdp::testing::contains;

namespace {

DimensionSpec conv(const std::string& id, int options, int group = 1, int max = 0) {
  return {id, DimRole::conv_out, options, group, max ? max : options * group};
}

DimensionSpec fixed(const std::string& id, int elems) {
  return {id, DimRole::fixed_external, 1, elems, elems};
}

DimensionSpec role_dim(const std::string& id, DimRole role, int options) {
  return {id, role, options, 1, options};
}

BlockSpec cnn(int id, std::vector<std::string> dims, std::string input, bool removable = false) {
  return {id, BlockKind::cnn_chain, std::move(dims), removable, std::move(input)};
}

BlockSpec transformer(int id, const std::string& p, bool removable) {
  return {id, BlockKind::transformer,
          {p + "emb", p + "head", p + "qk", p + "v", p + "mlp"}, removable, std::nullopt};
}

std::vector<DimensionSpec> transformer_dims(const std::string& p, int options) {
  return {role_dim(p + "emb", DimRole::emb, options), role_dim(p + "head", DimRole::head, options),
          role_dim(p + "qk", DimRole::qk, options), role_dim(p + "v", DimRole::v, options),
          role_dim(p + "mlp", DimRole::mlp, options)};
}

const char* kMinimal = R"({
  "name": "minimal",
  "dims": [
    {"id": "in", "role": "fixed_external", "option_count": 1, "max_elements": 3},
    {"id": "c1", "role": "conv_out", "option_count": 2, "group_size": 1, "max_elements": 2},
    {"id": "c2", "role": "conv_out", "option_count": 2, "group_size": 1, "max_elements": 2}
  ],
  "blocks": [{"id": 1, "kind": "cnn_chain", "input_ref": "in", "dims": ["c1", "c2"]}]
})";

}  // namespace

TEST_CASE("minimal cnn document parses to one block with two dims") {
  const auto arch = parse_architecture(kMinimal);
  CHECK(arch.block_count() == 1);
  CHECK(arch.blocks()[0].dims.size() == 2);
  CHECK(arch.resolved()[0].input_dim == arch.dim_index("in"));
  CHECK_FALSE(arch.blocks()[0].removable);
}

TEST_CASE("transformer block resolves its five role slots in any order") {
  const char* doc = R"({
    "name": "t",
    "dims": [
      {"id": "m", "role": "mlp", "option_count": 2, "max_elements": 2},
      {"id": "e", "role": "emb", "option_count": 2, "max_elements": 2},
      {"id": "q", "role": "qk", "option_count": 2, "max_elements": 2},
      {"id": "h", "role": "head", "option_count": 2, "max_elements": 2},
      {"id": "v", "role": "v", "option_count": 2, "max_elements": 2}
    ],
    "blocks": [{"id": 1, "kind": "transformer", "removable": true, "dims": ["m", "q", "e", "v", "h"]}]
  })";
  const auto arch = parse_architecture(doc);
  REQUIRE(arch.blocks()[0].dims.size() == 5);
  const auto& slots = arch.resolved()[0].slots;
  CHECK(arch.dims()[slots[kEmb]].id == "e");
  CHECK(arch.dims()[slots[kHead]].id == "h");
  CHECK(arch.dims()[slots[kQk]].id == "q");
  CHECK(arch.dims()[slots[kV]].id == "v");
  CHECK(arch.dims()[slots[kMlp]].id == "m");
}

TEST_CASE("undeclared dimension is named in the error") {
  const char* doc = R"({
    "name": "bad",
    "dims": [{"id": "in", "role": "fixed_external", "option_count": 1, "max_elements": 3}],
    "blocks": [{"id": 1, "kind": "cnn_chain", "input_ref": "in", "dims": ["x9"]}]
  })";
  const auto err = catch_error([&] { parse_architecture(doc); });
  REQUIRE(err);
  CHECK(err->kind == ErrorKind::validation);
  CHECK(contains(err->message, "x9"));
}

TEST_CASE("subnetwork counts") {
  SUBCASE("non-removable block with options 2 and 3") {
    auto arch = ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2), conv("b", 3)},
                                         {cnn(1, {"a", "b"}, "in")});
    CHECK(subnetwork_count(arch) == 6);
  }
  SUBCASE("removable block adds the removed state") {
    auto arch = ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2), conv("b", 3)},
                                         {cnn(1, {"a", "b"}, "in", true)});
    CHECK(subnetwork_count(arch) == 7);
  }
  SUBCASE("two removable transformer blocks with two options per dim") {
    auto dims = transformer_dims("x.", 2);
    auto more = transformer_dims("y.", 2);
    dims.insert(dims.end(), more.begin(), more.end());
    auto arch = ArchitectureSpec::create("t", dims, {transformer(1, "x.", true), transformer(2, "y.", true)});
    CHECK(subnetwork_count(arch) == 1089);
  }
  SUBCASE("large counts do not overflow") {
    std::vector<DimensionSpec> dims{fixed("in", 1)};
    std::vector<BlockSpec> blocks;
    for (int b = 1; b <= 40; ++b) {
      dims.push_back(conv("c" + std::to_string(b), 64));
      blocks.push_back(cnn(b, {"c" + std::to_string(b)}, "in"));
    }
    auto arch = ArchitectureSpec::create("big", dims, blocks);
    BigInt expected = 1;
    for (int i = 0; i < 40; ++i) expected *= 64;
    CHECK(subnetwork_count(arch) == expected);
  }
}

TEST_CASE("kept elements per option") {
  CHECK(kept_elements({"d", DimRole::conv_out, 5, 1, 5}, 3) == 3);
  CHECK(kept_elements({"d", DimRole::conv_out, 2, 32, 64}, 2) == 64);
  CHECK(kept_elements({"d", DimRole::conv_out, 2, 32, 60}, 2) == 60);
  CHECK(kept_elements({"d", DimRole::conv_out, 2, 32, 60}, 1) == 32);
  CHECK(catch_error([] { kept_elements({"d", DimRole::conv_out, 2, 32, 60}, 3); })->kind ==
        ErrorKind::invalid_argument);
  CHECK(catch_error([] { kept_elements({"d", DimRole::conv_out, 2, 32, 60}, 0); }));
}

TEST_CASE("dimension invariants are enforced") {
  auto make = [](DimensionSpec d) {
    return catch_error([&] {
      ArchitectureSpec::create("a", {fixed("in", 1), d}, {cnn(1, {d.id}, "in")});
    });
  };
  SUBCASE("option span beyond max elements") {
    const auto err = make({"w", DimRole::conv_out, 3, 32, 60});
    REQUIRE(err);
    CHECK(contains(err->message, "w"));
  }
  SUBCASE("last option may be partial") { CHECK_FALSE(make({"w", DimRole::conv_out, 2, 32, 60})); }
  SUBCASE("fixed dimensions have one option") {
    CHECK(make({"w", DimRole::fixed_external, 2, 1, 2}));
  }
  SUBCASE("nonpositive sizes") {
    CHECK(make({"w", DimRole::conv_out, 0, 1, 1}));
    CHECK(make({"w", DimRole::conv_out, 1, 0, 1}));
    CHECK(make({"w", DimRole::conv_out, 1, 1, 0}));
  }
}

TEST_CASE("block structure rules") {
  SUBCASE("duplicate dimension ids") {
    const auto err = catch_error([] {
      ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2), conv("a", 3)}, {cnn(1, {"a"}, "in")});
    });
    REQUIRE(err);
    CHECK(contains(err->message, "a"));
  }
  SUBCASE("dimension shared by two blocks") {
    CHECK(catch_error([] {
      ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2)},
                               {cnn(1, {"a"}, "in"), cnn(2, {"a"}, "in")});
    }));
  }
  SUBCASE("block ids must run 1..B") {
    CHECK(catch_error([] {
      ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2)}, {cnn(2, {"a"}, "in")});
    }));
  }
  SUBCASE("cnn block needs an input") {
    CHECK(catch_error([] {
      ArchitectureSpec::create("a", {conv("a", 2)},
                               {{1, BlockKind::cnn_chain, {"a"}, false, std::nullopt}});
    }));
  }
  SUBCASE("input owned by another block as a prunable dim is rejected") {
    CHECK(catch_error([] {
      ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2), conv("b", 2)},
                               {cnn(1, {"a"}, "in"), cnn(2, {"b"}, "a")});
    }));
  }
  SUBCASE("fixed output of an earlier block may feed the next block") {
    CHECK_FALSE(catch_error([] {
      ArchitectureSpec::create("a", {fixed("in", 1), conv("a", 2), fixed("t", 4), conv("b", 2)},
                               {cnn(1, {"a", "t"}, "in"), cnn(2, {"b"}, "t")});
    }));
  }
  SUBCASE("transformer with a missing role") {
    auto dims = transformer_dims("x.", 2);
    dims[4].role = DimRole::qk;
    CHECK(catch_error([&] { ArchitectureSpec::create("t", dims, {transformer(1, "x.", false)}); }));
  }
  SUBCASE("transformer role inside a cnn block") {
    CHECK(catch_error([] {
      ArchitectureSpec::create("a", {fixed("in", 1), role_dim("e", DimRole::emb, 2)}, {cnn(1, {"e"}, "in")});
    }));
  }
}

TEST_CASE("document errors carry a location") {
  SUBCASE("syntax error") {
    const auto err = catch_error([] { parse_architecture("{\n  \"name\": ,\n}"); });
    REQUIRE(err);
    CHECK(contains(err->message, "line 2"));
  }
  SUBCASE("unknown role") {
    const auto err = catch_error([] {
      parse_architecture(R"({"name":"a","dims":[{"id":"x","role":"bogus","option_count":1,"max_elements":1}],"blocks":[]})");
    });
    REQUIRE(err);
    CHECK(contains(err->message, "bogus"));
  }
  SUBCASE("unknown key") {
    CHECK(catch_error([] { parse_architecture(R"({"name":"a","dims":[],"blocks":[],"extra":1})"); }));
  }
  SUBCASE("missing file is an I/O error") {
    CHECK(catch_error([] { load_architecture("/nonexistent/arch.json"); })->kind == ErrorKind::io);
  }
}

TEST_CASE("serialize then parse reproduces the architecture") {
  const auto arch = parse_architecture(kMinimal);
  const auto again = parse_architecture(serialize_architecture(arch));
  CHECK(arch == again);
  CHECK(serialize_architecture(again) == serialize_architecture(arch));
}
