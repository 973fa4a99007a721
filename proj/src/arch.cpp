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

#include "mdprune/arch.hpp"

#include <algorithm>
#include <set>

#include "json_util.hpp"
#include "mdprune/error.hpp"

namespace mdp {

namespace {

constexpr std::array<std::pair<DimRole, std::string_view>, 7> kRoleNames{{
    {DimRole::conv_out, "conv_out"},
    {DimRole::emb, "emb"},
    {DimRole::head, "head"},
    {DimRole::qk, "qk"},
    {DimRole::v, "v"},
    {DimRole::mlp, "mlp"},
    {DimRole::fixed_external, "fixed_external"},
}};

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

void check_dimension(const DimensionSpec& d) {
  const std::string where = "dimension " + squote(d.id);
  if (d.id.empty()) throw ValidationError("dimension with empty id");
  if (d.option_count < 1)
    throw ValidationError(where + ": option_count must be positive");
  if (d.group_size < 1)
    throw ValidationError(where + ": group_size must be positive");
  if (d.max_elements < 1)
    throw ValidationError(where + ": max_elements must be positive");
  // Option j keeps min(j*g, max): the last option may not start beyond max.
  const long long span = static_cast<long long>(d.option_count) * d.group_size;
  if (span > static_cast<long long>(d.max_elements) + d.group_size - 1)
    throw ValidationError(where + ": option_count * group_size (" +
                          std::to_string(span) + ") exceeds max_elements + " +
                          "group_size - 1 (" +
                          std::to_string(d.max_elements + d.group_size - 1) +
                          ")");
  if (d.role == DimRole::fixed_external) {
    if (d.option_count != 1)
      throw ValidationError(where + ": fixed_external requires option_count 1");
    if (d.group_size < d.max_elements)
      throw ValidationError(
          where + ": fixed_external must keep all elements (group_size >= "
                  "max_elements)");
  }
}

}  // namespace

std::string_view to_string(DimRole role) {
  for (const auto& [r, name] : kRoleNames)
    if (r == role) return name;
  return "?";
}

std::string_view to_string(BlockKind kind) {
  return kind == BlockKind::cnn_chain ? "cnn_chain" : "transformer";
}

std::optional<DimRole> parse_dim_role(std::string_view text) {
  for (const auto& [r, name] : kRoleNames)
    if (name == text) return r;
  return std::nullopt;
}

std::optional<BlockKind> parse_block_kind(std::string_view text) {
  if (text == "cnn_chain") return BlockKind::cnn_chain;
  if (text == "transformer") return BlockKind::transformer;
  return std::nullopt;
}

int kept_elements(const DimensionSpec& dim, int option) {
  if (option < 1 || option > dim.option_count)
    throw ArgumentError("option " + std::to_string(option) +
                        " out of range [1, " +
                        std::to_string(dim.option_count) + "] for dimension " +
                        squote(dim.id));
  const long long kept = static_cast<long long>(option) * dim.group_size;
  return static_cast<int>(std::min<long long>(kept, dim.max_elements));
}

ArchitectureSpec ArchitectureSpec::create(std::string name,
                                          std::vector<DimensionSpec> dims,
                                          std::vector<BlockSpec> blocks) {
  ArchitectureSpec arch;
  arch.name_ = std::move(name);
  arch.dims_ = std::move(dims);
  arch.blocks_ = std::move(blocks);

  for (std::size_t i = 0; i < arch.dims_.size(); ++i) {
    const auto& d = arch.dims_[i];
    check_dimension(d);
    if (!arch.index_.emplace(d.id, i).second)
      throw ValidationError("duplicate dimension " + squote(d.id));
  }

  arch.owner_.assign(arch.dims_.size(), -1);
  arch.resolved_.resize(arch.blocks_.size());
  for (std::size_t b = 0; b < arch.blocks_.size(); ++b) {
    const auto& block = arch.blocks_[b];
    const std::string where = "block " + std::to_string(block.id);
    if (block.id != static_cast<int>(b) + 1)
      throw ValidationError("block ids must be 1..B in order: found " +
                            std::to_string(block.id) + " at position " +
                            std::to_string(b + 1));
    if (block.dims.empty()) throw ValidationError(where + ": no dimensions");

    auto& res = arch.resolved_[b];
    for (const auto& id : block.dims) {
      auto it = arch.index_.find(id);
      if (it == arch.index_.end())
        throw ValidationError(where + ": undeclared dimension " + squote(id));
      const std::size_t di = it->second;
      if (arch.owner_[di] >= 0)
        throw ValidationError(where + ": dimension " + squote(id) +
                              " already belongs to block " +
                              std::to_string(arch.owner_[di] + 1));
      arch.owner_[di] = static_cast<int>(b);
      res.dims.push_back(di);
    }

    if (block.kind == BlockKind::cnn_chain) {
      for (std::size_t di : res.dims) {
        const auto role = arch.dims_[di].role;
        if (role != DimRole::conv_out && role != DimRole::fixed_external)
          throw ValidationError(where + ": cnn_chain dimension " +
                                squote(arch.dims_[di].id) + " has role " +
                                std::string(to_string(role)));
      }
      if (!block.input_ref)
        throw ValidationError(where + ": cnn_chain block needs input_ref");
      auto it = arch.index_.find(*block.input_ref);
      if (it == arch.index_.end())
        throw ValidationError(where + ": input_ref names undeclared dimension " +
                              squote(*block.input_ref));
      const std::size_t in = it->second;
      const auto& in_dim = arch.dims_[in];
      if (in_dim.role != DimRole::conv_out &&
          in_dim.role != DimRole::fixed_external)
        throw ValidationError(where + ": input_ref " + squote(in_dim.id) +
                              " must be conv_out or fixed_external");
      const int owner = arch.owner_[in];
      if (owner == static_cast<int>(b))
        throw ValidationError(where + ": input_ref " + squote(in_dim.id) +
                              " belongs to the block itself");
      if (owner > static_cast<int>(b))
        throw ValidationError(where + ": input_ref " + squote(in_dim.id) +
                              " is declared by a later block");
      if (owner >= 0 && in_dim.role != DimRole::fixed_external)
        throw ValidationError(
            where + ": input_ref " + squote(in_dim.id) +
            " is a prunable dimension of block " + std::to_string(owner + 1) +
            "; dimensions crossing blocks must be fixed_external");
      res.input_dim = in;
    } else {
      if (block.input_ref)
        throw ValidationError(where + ": transformer block takes no input_ref");
      if (res.dims.size() != 5)
        throw ValidationError(where + ": transformer block needs exactly 5 "
                              "dimensions (emb, head, qk, v, mlp), found " +
                              std::to_string(res.dims.size()));
      std::array<bool, 5> seen{};
      for (std::size_t di : res.dims) {
        int slot = -1;
        switch (arch.dims_[di].role) {
          case DimRole::emb: slot = kEmb; break;
          case DimRole::head: slot = kHead; break;
          case DimRole::qk: slot = kQk; break;
          case DimRole::v: slot = kV; break;
          case DimRole::mlp: slot = kMlp; break;
          default: break;
        }
        if (slot < 0 || seen[slot])
          throw ValidationError(where + ": transformer roles must be exactly "
                                "emb, head, qk, v, mlp (offending dimension " +
                                squote(arch.dims_[di].id) + ")");
        seen[slot] = true;
        res.slots[slot] = di;
      }
    }
  }
  return arch;
}

std::optional<std::size_t> ArchitectureSpec::find_dim(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ArchitectureSpec::dim_index(std::string_view id) const {
  if (auto i = find_dim(id)) return *i;
  throw ValidationError("unknown dimension " + squote(id));
}

BigInt subnetwork_count(const ArchitectureSpec& arch) {
  BigInt total = 1;
  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    BigInt states = 1;
    for (std::size_t di : arch.resolved()[b].dims)
      states *= arch.dims()[di].option_count;
    if (arch.blocks()[b].removable) states += 1;
    total *= states;
  }
  return total;
}

// ---------------------------------------------------------------------------
// File format

ArchitectureSpec parse_architecture(std::string_view document) {
  using namespace detail;
  const Json root = parse_document(document, "architecture");
  require_object(root, "$");
  check_keys(root, "$", {"name", "dims", "blocks"});

  std::string name = get_string(member(root, "$", "name"), "$.name");

  const Json& jdims = member(root, "$", "dims");
  require_array(jdims, "$.dims");
  std::vector<DimensionSpec> dims;
  for (std::size_t i = 0; i < jdims.size(); ++i) {
    const std::string p = index_path("$.dims", i);
    const Json& jd = jdims[i];
    require_object(jd, p);
    check_keys(jd, p, {"id", "role", "option_count", "group_size", "max_elements"});
    DimensionSpec d;
    d.id = get_string(member(jd, p, "id"), p + ".id");
    const std::string role = get_string(member(jd, p, "role"), p + ".role");
    auto r = parse_dim_role(role);
    if (!r) throw ValidationError(p + ".role: unknown role '" + role + "'");
    d.role = *r;
    auto as_int = [&](const Json& v, const std::string& path) {
      const long long x = get_integer(v, path);
      if (x < 1 || x > (1LL << 30))
        throw ValidationError(path + ": must be a positive integer");
      return static_cast<int>(x);
    };
    d.option_count = as_int(member(jd, p, "option_count"), p + ".option_count");
    d.max_elements = as_int(member(jd, p, "max_elements"), p + ".max_elements");
    if (jd.contains("group_size"))
      d.group_size = as_int(jd["group_size"], p + ".group_size");
    else
      d.group_size = d.role == DimRole::fixed_external ? d.max_elements : 1;
    dims.push_back(std::move(d));
  }

  const Json& jblocks = member(root, "$", "blocks");
  require_array(jblocks, "$.blocks");
  std::vector<BlockSpec> blocks;
  for (std::size_t i = 0; i < jblocks.size(); ++i) {
    const std::string p = index_path("$.blocks", i);
    const Json& jb = jblocks[i];
    require_object(jb, p);
    check_keys(jb, p, {"id", "kind", "removable", "input_ref", "dims"});
    BlockSpec b;
    b.id = static_cast<int>(get_integer(member(jb, p, "id"), p + ".id"));
    const std::string kind = get_string(member(jb, p, "kind"), p + ".kind");
    auto k = parse_block_kind(kind);
    if (!k) throw ValidationError(p + ".kind: unknown kind '" + kind + "'");
    b.kind = *k;
    if (jb.contains("removable"))
      b.removable = get_bool(jb["removable"], p + ".removable");
    if (jb.contains("input_ref") && !jb["input_ref"].is_null())
      b.input_ref = get_string(jb["input_ref"], p + ".input_ref");
    const Json& bd = member(jb, p, "dims");
    require_array(bd, p + ".dims");
    for (std::size_t k2 = 0; k2 < bd.size(); ++k2)
      b.dims.push_back(get_string(bd[k2], index_path(p + ".dims", k2)));
    blocks.push_back(std::move(b));
  }

  return ArchitectureSpec::create(std::move(name), std::move(dims),
                                  std::move(blocks));
}

ArchitectureSpec load_architecture(const std::string& path) {
  try {
    return parse_architecture(detail::read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string serialize_architecture(const ArchitectureSpec& arch) {
  using detail::Json;
  Json root = Json::object();
  root["name"] = arch.name();
  Json dims = Json::array();
  for (const auto& d : arch.dims()) {
    dims.push_back({{"id", d.id},
                    {"role", std::string(to_string(d.role))},
                    {"option_count", d.option_count},
                    {"group_size", d.group_size},
                    {"max_elements", d.max_elements}});
  }
  root["dims"] = std::move(dims);
  Json blocks = Json::array();
  for (const auto& b : arch.blocks()) {
    Json jb = {{"id", b.id},
               {"kind", std::string(to_string(b.kind))},
               {"removable", b.removable},
               {"dims", b.dims}};
    if (b.input_ref) jb["input_ref"] = *b.input_ref;
    blocks.push_back(std::move(jb));
  }
  root["blocks"] = std::move(blocks);
  return root.dump(2) + "\n";
}

}  // namespace mdp
