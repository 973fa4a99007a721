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

#include "mdprune/latency.hpp"

#include <cmath>
#include <functional>

#include "mdprune/error.hpp"
#include "rng.hpp"

namespace mdp {

namespace {

std::string table_name(int block_id, TablePart part) {
  return "block " + std::to_string(block_id) + " table " + part.label();
}

int quantize(int elems, int tile) {
  return (elems + tile - 1) / tile * tile;
}

int input_option(const ArchitectureSpec& arch, const Assignment& a,
                 std::size_t block) {
  return a.omega[arch.resolved()[block].input_dim];
}

void check_index(const LatencyTable& t, std::size_t axis, int option) {
  if (option < 1 || static_cast<std::size_t>(option) > t.shape[axis])
    throw ArgumentError(table_name(t.block_id, t.part) + ": option " +
                        std::to_string(option) + " out of range on axis " +
                        std::to_string(axis) + " (size " +
                        std::to_string(t.shape[axis]) + ")");
}

}  // namespace

std::string_view to_string(PartKind kind) {
  switch (kind) {
    case PartKind::conv_layer: return "conv_layer";
    case PartKind::qk: return "qk";
    case PartKind::vproj: return "vproj";
    case PartKind::mlp: return "mlp";
  }
  return "?";
}

std::string TablePart::label() const {
  if (kind == PartKind::conv_layer)
    return "conv_layer(" + std::to_string(layer) + ")";
  return "C^" + std::string(to_string(kind));
}

double LatencyTable::at(std::span<const int> zero_based) const {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape.size(); ++k)
    flat = flat * shape[k] + static_cast<std::size_t>(zero_based[k]);
  return data[flat];
}

void check_table(const LatencyTable& t) {
  const std::string name = table_name(t.block_id, t.part);
  if (t.part.kind == PartKind::conv_layer && t.part.layer < 1)
    throw ValidationError(name + ": layer index must be >= 1");
  if (t.shape.size() != t.part.rank())
    throw ValidationError(name + ": rank " + std::to_string(t.shape.size()) +
                          " does not match part (expected rank " +
                          std::to_string(t.part.rank()) + ")");
  if (t.axes.size() != t.shape.size())
    throw ValidationError(name + ": " + std::to_string(t.axes.size()) +
                          " axes for a rank-" + std::to_string(t.shape.size()) +
                          " table");
  std::size_t n = 1;
  for (std::size_t s : t.shape) {
    if (s == 0) throw ValidationError(name + ": zero-length axis");
    n *= s;
  }
  if (n != t.data.size())
    throw ValidationError(name + ": shape holds " + std::to_string(n) +
                          " entries, data has " + std::to_string(t.data.size()));
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    if (!std::isfinite(t.data[i]))
      throw ValidationError(name + ": non-finite entry at index " +
                            std::to_string(i));
    if (t.data[i] < 0.0)
      throw ValidationError(name + ": negative entry at index " +
                            std::to_string(i));
  }
}

LatencyTableSet::LatencyTableSet(std::vector<LatencyTable> tables)
    : tables_(std::move(tables)) {
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    const auto& t = tables_[i];
    check_table(t);
    if (!index_.emplace(std::make_tuple(t.block_id, t.part), i).second)
      throw ValidationError("duplicate " + table_name(t.block_id, t.part));
  }
}

const LatencyTable* LatencyTableSet::find(int block_id, TablePart part) const {
  auto it = index_.find(std::make_tuple(block_id, part));
  return it == index_.end() ? nullptr : &tables_[it->second];
}

const LatencyTable& LatencyTableSet::get(int block_id, TablePart part) const {
  if (const auto* t = find(block_id, part)) return *t;
  throw ValidationError("missing " + table_name(block_id, part));
}

double block_latency(const Assignment& a, const LatencyTableSet& tables,
                     const ArchitectureSpec& arch, std::size_t block) {
  const auto& spec = arch.blocks()[block];
  const auto& res = arch.resolved()[block];
  if (spec.kind == BlockKind::cnn_chain) {
    double sum = 0.0;
    int in = input_option(arch, a, block);
    for (std::size_t k = 0; k < res.dims.size(); ++k) {
      const auto& t = tables.get(spec.id, TablePart::conv(static_cast<int>(k) + 1));
      const int out = a.omega[res.dims[k]];
      check_index(t, 0, in);
      check_index(t, 1, out);
      sum += t.at(in - 1, out - 1);
      in = out;
    }
    return sum;
  }
  const int e = a.omega[res.slots[kEmb]];
  const int h = a.omega[res.slots[kHead]];
  const int q = a.omega[res.slots[kQk]];
  const int v = a.omega[res.slots[kV]];
  const int m = a.omega[res.slots[kMlp]];
  const auto& qk = tables.get(spec.id, TablePart::qk());
  const auto& vp = tables.get(spec.id, TablePart::vproj());
  const auto& mlp = tables.get(spec.id, TablePart::mlp());
  check_index(qk, 0, e), check_index(qk, 1, h), check_index(qk, 2, q);
  check_index(vp, 0, e), check_index(vp, 1, h), check_index(vp, 2, v);
  check_index(mlp, 0, e), check_index(mlp, 1, m);
  return qk.at(e - 1, h - 1, q - 1) + vp.at(e - 1, h - 1, v - 1) +
         mlp.at(e - 1, m - 1);
}

double constraint_value(const Assignment& assignment,
                        const LatencyTableSet& tables,
                        const ArchitectureSpec& arch) {
  check_assignment(arch, assignment);
  double total = 0.0;
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    if (assignment.kappa[b])
      total += block_latency(assignment, tables, arch, b);
  return total;
}

BlockTensor embed_block_tensor(const ArchitectureSpec& arch,
                               const LatencyTableSet& tables,
                               std::size_t block) {
  const auto& res = arch.resolved()[block];
  BlockTensor out;
  out.block = block;
  std::size_t n = 1;
  for (std::size_t di : res.dims) {
    const auto c = static_cast<std::size_t>(arch.dims()[di].option_count);
    out.shape.push_back(c);
    n *= c;
    if (n > kMaxJointEntries)
      throw LimitError("block " + std::to_string(arch.blocks()[block].id) +
                       ": joint tensor exceeds " +
                       std::to_string(kMaxJointEntries) + " entries");
  }
  out.data.resize(n);

  // Walk every configuration in row-major order and price it with the
  // decomposed tables.
  Assignment a = full_assignment(arch);
  std::vector<int> idx(res.dims.size(), 1);
  for (std::size_t flat = 0; flat < n; ++flat) {
    for (std::size_t k = 0; k < res.dims.size(); ++k) a.omega[res.dims[k]] = idx[k];
    out.data[flat] = block_latency(a, tables, arch, block);
    for (std::size_t k = idx.size(); k-- > 0;) {
      if (idx[k] < static_cast<int>(out.shape[k])) {
        ++idx[k];
        break;
      }
      idx[k] = 1;
    }
  }
  return out;
}

double joint_constraint_value(const Assignment& assignment,
                              const std::vector<BlockTensor>& full_tables,
                              const ArchitectureSpec& arch) {
  check_assignment(arch, assignment);
  double total = 0.0;
  for (const auto& tensor : full_tables) {
    const std::size_t b = tensor.block;
    if (!assignment.kappa[b]) continue;
    const auto& res = arch.resolved()[b];
    if (tensor.shape.size() != res.dims.size())
      throw ValidationError("joint tensor rank does not match block " +
                            std::to_string(arch.blocks()[b].id));
    if (tensor.data.size() > kMaxJointEntries)
      throw LimitError("joint tensor too large");
    // Chain of outer products of the one-hot vectors.
    std::vector<double> mask{1.0};
    for (std::size_t k = 0; k < res.dims.size(); ++k) {
      const std::size_t c = tensor.shape[k];
      std::vector<double> onehot(c, 0.0);
      onehot[assignment.omega[res.dims[k]] - 1] = 1.0;
      std::vector<double> next(mask.size() * c);
      for (std::size_t i = 0; i < mask.size(); ++i)
        for (std::size_t j = 0; j < c; ++j) next[i * c + j] = mask[i] * onehot[j];
      mask = std::move(next);
    }
    if (mask.size() != tensor.data.size())
      throw ValidationError("joint tensor shape does not match block " +
                            std::to_string(arch.blocks()[b].id));
    double sum = 0.0;
    for (std::size_t i = 0; i < mask.size(); ++i) sum += mask[i] * tensor.data[i];
    total += sum;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Synthetic cost model

double synth_conv_cost(const LatencyModelParams& p, int in_elems, int out_elems) {
  return p.overhead + p.unit_cost * p.spatial *
                          static_cast<double>(quantize(in_elems, p.tile)) *
                          static_cast<double>(quantize(out_elems, p.tile));
}

LatencyTableSet synth_lut(const ArchitectureSpec& arch,
                          const LatencyModelParams& params, std::uint64_t seed) {
  if (params.tile < 1) throw ArgumentError("tile must be positive");
  if (!(params.unit_cost > 0.0) || !(params.spatial > 0.0) ||
      params.overhead < 0.0 || params.noise < 0.0 || params.noise >= 1.0)
    throw ArgumentError(
        "cost model needs unit_cost > 0, spatial > 0, overhead >= 0 and "
        "0 <= noise < 1");
  std::vector<LatencyTable> tables;
  std::uint64_t stream = 0;
  auto add = [&](LatencyTable t, const std::function<double(std::span<const int>)>& cost) {
    detail::Rng rng(detail::mix_seed(seed, stream++));
    std::size_t n = 1;
    for (auto s : t.shape) n *= s;
    t.data.resize(n);
    std::vector<int> idx(t.shape.size(), 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
      double v = cost(idx);
      if (params.noise > 0.0) v *= 1.0 + params.noise * (2.0 * rng.uniform() - 1.0);
      t.data[flat] = v;
      for (std::size_t k = idx.size(); k-- > 0;) {
        if (++idx[k] < static_cast<int>(t.shape[k])) break;
        idx[k] = 0;
      }
    }
    tables.push_back(std::move(t));
  };
  const auto& dims = arch.dims();
  auto kept = [&](std::size_t di, int zero_based) {
    return kept_elements(dims[di], zero_based + 1);
  };
  const double mac = params.unit_cost * params.spatial;
  auto q = [&](long long elems) {
    return static_cast<double>((elems + params.tile - 1) / params.tile * params.tile);
  };

  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    const auto& spec = arch.blocks()[b];
    const auto& res = arch.resolved()[b];
    if (spec.kind == BlockKind::cnn_chain) {
      std::size_t in = res.input_dim;
      for (std::size_t k = 0; k < res.dims.size(); ++k) {
        const std::size_t out = res.dims[k];
        LatencyTable t;
        t.block_id = spec.id;
        t.part = TablePart::conv(static_cast<int>(k) + 1);
        t.axes = {dims[in].id, dims[out].id};
        t.shape = {static_cast<std::size_t>(dims[in].option_count),
                   static_cast<std::size_t>(dims[out].option_count)};
        add(std::move(t), [&, in, out](std::span<const int> i) {
          return synth_conv_cost(params, kept(in, i[0]), kept(out, i[1]));
        });
        in = out;
      }
      continue;
    }
    const auto e = res.slots[kEmb], h = res.slots[kHead], qk = res.slots[kQk],
               v = res.slots[kV], m = res.slots[kMlp];
    auto extent = [&](std::size_t di) {
      return static_cast<std::size_t>(dims[di].option_count);
    };
    // Q and K projections: emb x (heads * qk), times two.
    add({spec.id, TablePart::qk(), {dims[e].id, dims[h].id, dims[qk].id},
         {extent(e), extent(h), extent(qk)}, {}},
        [&, e, h, qk](std::span<const int> i) {
          return params.overhead +
                 2.0 * mac * q(kept(e, i[0])) *
                     q(static_cast<long long>(kept(h, i[1])) * kept(qk, i[2]));
        });
    // V projection and output projection.
    add({spec.id, TablePart::vproj(), {dims[e].id, dims[h].id, dims[v].id},
         {extent(e), extent(h), extent(v)}, {}},
        [&, e, h, v](std::span<const int> i) {
          return params.overhead +
                 2.0 * mac * q(kept(e, i[0])) *
                     q(static_cast<long long>(kept(h, i[1])) * kept(v, i[2]));
        });
    // Two MLP linears.
    add({spec.id, TablePart::mlp(), {dims[e].id, dims[m].id},
         {extent(e), extent(m)}, {}},
        [&, e, m](std::span<const int> i) {
          return params.overhead +
                 2.0 * mac * q(kept(e, i[0])) * q(kept(m, i[1]));
        });
  }
  return LatencyTableSet(std::move(tables));
}

// ---------------------------------------------------------------------------
// Single-row (linear) latency model

double table_entry_or_zero(const LatencyTable& t, int row, int col) {
  if (t.shape.size() != 2)
    throw ArgumentError("single-row view needs a rank-2 table");
  check_index(t, 0, row);
  if (col == 0) return 0.0;
  check_index(t, 1, col);
  return t.at(row - 1, col - 1);
}

double linear_channel_cost(const LatencyTable& t, int p_prev, int j) {
  if (j < 1) throw ArgumentError("output option must be >= 1");
  return table_entry_or_zero(t, p_prev, j) - table_entry_or_zero(t, p_prev, j - 1);
}

EstimationError estimation_error(const LatencyTable& t, int p_prev, int p_hat,
                                 int j) {
  if (p_hat > p_prev)
    throw ArgumentError("estimation_error requires p_hat <= p_prev (got " +
                        std::to_string(p_hat) + " > " + std::to_string(p_prev) +
                        ")");
  if (j < 1 || p_hat < 1) throw ArgumentError("options must be >= 1");
  const double prev_lo = table_entry_or_zero(t, p_prev, j - 1);
  const double hat_lo = table_entry_or_zero(t, p_hat, j - 1);
  const double prev_hi = table_entry_or_zero(t, p_prev, j);
  const double hat_hi = table_entry_or_zero(t, p_hat, j);
  // |R_hat - R| regrouped as |x + y|; the bound is |x| + |y| on the same
  // rounded terms, so epsilon <= bound holds in floating point too.
  const double x = prev_lo - hat_lo;
  const double y = hat_hi - prev_hi;
  return {std::fabs(x + y), std::fabs(x) + std::fabs(y)};
}

TrajectoryReport replay_trajectory(const PruneTrajectory& trajectory,
                                   const LatencyTableSet& tables,
                                   const ArchitectureSpec& arch) {
  for (std::size_t b = 0; b < arch.block_count(); ++b)
    if (arch.blocks()[b].kind != BlockKind::cnn_chain)
      throw ArgumentError("latency model comparison supports cnn_chain blocks "
                          "only (block " +
                          std::to_string(arch.blocks()[b].id) + " is a transformer)");
  for (std::size_t s = 0; s < trajectory.steps.size(); ++s) {
    const auto& cur = trajectory.steps[s];
    check_assignment(arch, cur);
    if (s == 0) continue;
    const auto& prev = trajectory.steps[s - 1];
    for (std::size_t i = 0; i < arch.dim_count(); ++i)
      if (cur.omega[i] > prev.omega[i])
        throw ArgumentError("trajectory step " + std::to_string(s) +
                            " widens dimension '" + arch.dims()[i].id + "'");
    for (std::size_t b = 0; b < arch.block_count(); ++b)
      if (cur.kappa[b] > prev.kappa[b])
        throw ArgumentError("trajectory step " + std::to_string(s) +
                            " restores removed block " +
                            std::to_string(arch.blocks()[b].id));
  }

  TrajectoryReport report;
  for (std::size_t s = 0; s < trajectory.steps.size(); ++s) {
    const auto& cur = trajectory.steps[s];
    const auto& prev = trajectory.steps[s == 0 ? 0 : s - 1];
    StepEstimate step;
    step.true_latency = constraint_value(cur, tables, arch);
    double linear_total = 0.0;
    for (std::size_t b = 0; b < arch.block_count(); ++b) {
      if (!cur.kappa[b]) continue;
      const auto& spec = arch.blocks()[b];
      const auto& res = arch.resolved()[b];
      double block_linear = 0.0;
      std::size_t in_dim = res.input_dim;
      for (std::size_t k = 0; k < res.dims.size(); ++k) {
        const auto& t = tables.get(spec.id, TablePart::conv(static_cast<int>(k) + 1));
        LayerEstimate le;
        le.block_id = spec.id;
        le.layer = static_cast<int>(k) + 1;
        le.p_prev = prev.omega[in_dim];
        le.p_hat = cur.omega[in_dim];
        le.j = cur.omega[res.dims[k]];
        le.true_latency = table_entry_or_zero(t, le.p_hat, le.j);
        // The marginal costs telescope to the row entry T(p_prev, j).
        le.linear_latency = table_entry_or_zero(t, le.p_prev, le.j);
        const auto err = estimation_error(t, le.p_prev, le.p_hat, le.j);
        le.epsilon = err.epsilon;
        le.bound = err.bound;
        block_linear += le.linear_latency;
        step.layers.push_back(le);
        in_dim = res.dims[k];
      }
      linear_total += block_linear;
    }
    step.linear_estimate = linear_total;
    step.gap = step.linear_estimate - step.true_latency;
    report.steps.push_back(std::move(step));
  }
  return report;
}

PruneTrajectory uniform_trajectory(const ArchitectureSpec& arch, int steps) {
  if (steps < 1) throw ArgumentError("trajectory needs at least one step");
  PruneTrajectory traj;
  for (int s = 0; s <= steps; ++s) {
    Assignment a = full_assignment(arch);
    for (std::size_t b = 0; b < arch.block_count(); ++b)
      for (std::size_t di : arch.resolved()[b].dims) {
        const int n = arch.dims()[di].option_count;
        a.omega[di] = n - static_cast<int>(std::lround(
                              static_cast<double>(n - 1) * s / steps));
      }
    traj.steps.push_back(std::move(a));
  }
  return traj;
}

}  // namespace mdp
