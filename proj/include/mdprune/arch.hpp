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

#ifndef MDPRUNE_ARCH_HPP
#define MDPRUNE_ARCH_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace mdp {

enum class DimRole { conv_out, emb, head, qk, v, mlp, fixed_external };
enum class BlockKind { cnn_chain, transformer };

std::string_view to_string(DimRole role);
std::string_view to_string(BlockKind kind);
std::optional<DimRole> parse_dim_role(std::string_view text);
std::optional<BlockKind> parse_block_kind(std::string_view text);

/// One prunable (or fixed) structural size. Option j (1-based) keeps
/// min(j * group_size, max_elements) elements.
struct DimensionSpec {
  std::string id;
  DimRole role = DimRole::conv_out;
  int option_count = 1;
  int group_size = 1;
  int max_elements = 1;

  bool operator==(const DimensionSpec&) const = default;
};

/// Number of elements kept when `option` (1-based) is selected.
/// Throws ArgumentError when the option is out of range.
int kept_elements(const DimensionSpec& dim, int option);

struct BlockSpec {
  int id = 0;
  BlockKind kind = BlockKind::cnn_chain;
  std::vector<std::string> dims;
  bool removable = false;
  std::optional<std::string> input_ref;

  bool operator==(const BlockSpec&) const = default;
};

/// Transformer dimension slots in the order the latency decomposition uses.
enum TransformerSlot : int { kEmb = 0, kHead = 1, kQk = 2, kV = 3, kMlp = 4 };

/// Index-resolved view of a block, filled in by ArchitectureSpec::create.
struct ResolvedBlock {
  std::vector<std::size_t> dims;  // global dim indices, block order
  // cnn_chain: dim index feeding the first layer.
  std::size_t input_dim = 0;
  // transformer: global dim index per TransformerSlot.
  std::array<std::size_t, 5> slots{};
};

/// Validated network topology. Immutable once created.
class ArchitectureSpec {
 public:
  ArchitectureSpec() = default;

  /// Validates every invariant and builds the lookup tables.
  /// Throws ValidationError naming the offending id on failure.
  static ArchitectureSpec create(std::string name,
                                 std::vector<DimensionSpec> dims,
                                 std::vector<BlockSpec> blocks);

  const std::string& name() const { return name_; }
  const std::vector<DimensionSpec>& dims() const { return dims_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const std::vector<ResolvedBlock>& resolved() const { return resolved_; }

  std::size_t dim_count() const { return dims_.size(); }
  std::size_t block_count() const { return blocks_.size(); }

  std::optional<std::size_t> find_dim(std::string_view id) const;
  /// Throws ValidationError when the id is unknown.
  std::size_t dim_index(std::string_view id) const;
  const DimensionSpec& dim(std::string_view id) const {
    return dims_[dim_index(id)];
  }

  /// Block owning the dimension, or nullopt for dims outside every block.
  std::optional<std::size_t> owner_block(std::size_t dim_index) const {
    const int b = owner_[dim_index];
    if (b < 0) return std::nullopt;
    return static_cast<std::size_t>(b);
  }

  bool operator==(const ArchitectureSpec& other) const {
    return name_ == other.name_ && dims_ == other.dims_ &&
           blocks_ == other.blocks_;
  }

 private:
  std::string name_;
  std::vector<DimensionSpec> dims_;
  std::vector<BlockSpec> blocks_;
  std::vector<ResolvedBlock> resolved_;
  std::vector<int> owner_;
  std::unordered_map<std::string, std::size_t> index_;
};

using BigInt = boost::multiprecision::cpp_int;

/// Number of distinct pruned structures: the product over blocks of the
/// block's option-count product, plus one for the all-removed state of a
/// removable block.
BigInt subnetwork_count(const ArchitectureSpec& arch);

/// Parses the architecture JSON document. Unknown keys are rejected.
ArchitectureSpec parse_architecture(std::string_view document);
ArchitectureSpec load_architecture(const std::string& path);
std::string serialize_architecture(const ArchitectureSpec& arch);

}  // namespace mdp

#endif  // MDPRUNE_ARCH_HPP
