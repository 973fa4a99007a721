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

#include "mdprune/validate.hpp"

#include "mdprune/error.hpp"

namespace mdp {

std::vector<ExpectedTable> expected_tables(const ArchitectureSpec& arch,
                                           std::size_t block) {
  const auto& spec = arch.blocks()[block];
  const auto& res = arch.resolved()[block];
  std::vector<ExpectedTable> out;
  if (spec.kind == BlockKind::cnn_chain) {
    std::size_t in = res.input_dim;
    for (std::size_t k = 0; k < res.dims.size(); ++k) {
      out.push_back({TablePart::conv(static_cast<int>(k) + 1), {in, res.dims[k]}});
      in = res.dims[k];
    }
  } else {
    const auto& s = res.slots;
    out.push_back({TablePart::qk(), {s[kEmb], s[kHead], s[kQk]}});
    out.push_back({TablePart::vproj(), {s[kEmb], s[kHead], s[kV]}});
    out.push_back({TablePart::mlp(), {s[kEmb], s[kMlp]}});
  }
  return out;
}

void validate_table_shapes(const ArchitectureSpec& arch,
                           const LatencyTableSet& tables) {
  std::size_t used = 0;
  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    const int id = arch.blocks()[b].id;
    for (const auto& exp : expected_tables(arch, b)) {
      const std::string name =
          "block " + std::to_string(id) + " table " + exp.part.label();
      const LatencyTable* t = tables.find(id, exp.part);
      if (!t) throw ValidationError(name + ": missing");
      ++used;
      if (t->shape.size() != exp.axes.size())
        throw ValidationError(name + ": expected rank " +
                              std::to_string(exp.axes.size()) + ", found " +
                              std::to_string(t->shape.size()));
      for (std::size_t k = 0; k < exp.axes.size(); ++k) {
        const auto& dim = arch.dims()[exp.axes[k]];
        if (t->axes[k] != dim.id)
          throw ValidationError(name + ": axis " + std::to_string(k) +
                                " expected dimension '" + dim.id + "', found '" +
                                t->axes[k] + "'");
        if (t->shape[k] != static_cast<std::size_t>(dim.option_count))
          throw ValidationError(name + ": axis " + std::to_string(k) +
                                " ('" + dim.id + "') expected " +
                                std::to_string(dim.option_count) + ", found " +
                                std::to_string(t->shape[k]));
      }
    }
  }
  if (used != tables.tables().size()) {
    for (const auto& t : tables.tables()) {
      bool known = false;
      if (t.block_id >= 1 && static_cast<std::size_t>(t.block_id) <= arch.block_count())
        for (const auto& exp : expected_tables(arch, t.block_id - 1))
          known = known || exp.part == t.part;
      if (!known)
        throw ValidationError("block " + std::to_string(t.block_id) + " table " +
                              t.part.label() + ": not used by the architecture");
    }
  }
}

void validate_problem_shapes(const ArchitectureSpec& arch,
                             const LatencyTableSet& tables,
                             const ImportanceSet& importances) {
  if (importances.size() != arch.dim_count())
    throw ValidationError("importance set has " +
                          std::to_string(importances.size()) +
                          " vectors, architecture has " +
                          std::to_string(arch.dim_count()) + " dimensions");
  for (std::size_t i = 0; i < arch.dim_count(); ++i) {
    const auto& d = arch.dims()[i];
    const auto& v = importances[i];
    if (v.dim_id != d.id)
      throw ValidationError("importance vector " + std::to_string(i) +
                            " is for '" + v.dim_id + "', expected '" + d.id + "'");
    if (v.values.size() != static_cast<std::size_t>(d.option_count))
      throw ValidationError("importance vector for '" + d.id + "': expected " +
                            std::to_string(d.option_count) + " entries, found " +
                            std::to_string(v.values.size()));
  }
  validate_table_shapes(arch, tables);
}

}  // namespace mdp
