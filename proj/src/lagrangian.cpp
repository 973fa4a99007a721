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

// Per-block best responses and the Lagrangian bound built from them.
//
// Relaxing the budget with a multiplier lambda >= 0 separates the problem by
// block:
//   L(lambda) = sum_b max_{states of b} [I_b - lambda * C_b] + lambda * budget
// which upper-bounds the constrained maximum for every lambda. A cnn_chain
// block couples only adjacent layers, so its inner maximum is a longest path
// over (layer, option) nodes. A transformer block is maximized by fixing
// (emb, head) and choosing qk, v and mlp independently.

#include <cmath>
#include <limits>

#include "mdprune/error.hpp"
#include "solver_internal.hpp"

namespace mdp {

namespace detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Range {
  int lo;
  int hi;
};

Range allowed(const int* dim_fix, std::size_t dim, int count) {
  if (dim_fix && dim_fix[dim] > 0) return {dim_fix[dim], dim_fix[dim]};
  return {1, count};
}

KeptResponse chain_response(const PruningProblem& problem, const CompiledBlock& cb,
                            double weight, double lambda, const int* dim_fix,
                            std::vector<int>* options) {
  const auto& vectors = problem.vectors();
  thread_local std::vector<double> prev, cur;
  thread_local std::vector<int> back;

  const std::size_t layers = cb.layers.size();
  // back[k * stride + o] = best input option for output option o of layer k.
  std::size_t stride = 0;
  for (const auto& l : cb.layers) stride = std::max(stride, l.table->shape[1]);
  back.assign(layers * stride, 0);

  const std::size_t rows0 = cb.layers.front().table->shape[0];
  prev.assign(rows0, kNegInf);
  prev[cb.input_option - 1] = 0.0;
  Range pr{cb.input_option, cb.input_option};

  for (std::size_t k = 0; k < layers; ++k) {
    const auto& layer = cb.layers[k];
    const LatencyTable& t = *layer.table;
    const std::size_t cols = t.shape[1];
    const auto& imp = vectors[layer.dim].values;
    const Range r = allowed(dim_fix, layer.dim, static_cast<int>(cols));
    cur.assign(cols, kNegInf);
    for (int o = r.lo; o <= r.hi; ++o) {
      double best = kNegInf;
      int arg = pr.lo;
      for (int i = pr.lo; i <= pr.hi; ++i) {
        const double v = prev[i - 1] - lambda * t.data[(i - 1) * cols + (o - 1)];
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      cur[o - 1] = best + weight * imp[o - 1];
      back[k * stride + (o - 1)] = arg;
    }
    std::swap(prev, cur);
    pr = r;
  }

  double best = kNegInf;
  int arg = pr.lo;
  for (int o = pr.lo; o <= pr.hi; ++o)
    if (prev[o - 1] > best) {
      best = prev[o - 1];
      arg = o;
    }

  // Walk back to recover the options and re-price the chosen path.
  thread_local std::vector<int> chosen;
  chosen.assign(layers, 0);
  for (std::size_t k = layers; k-- > 0;) {
    chosen[k] = arg;
    arg = back[k * stride + (arg - 1)];
  }
  KeptResponse out;
  out.score = best;
  int in = cb.input_option;
  for (std::size_t k = 0; k < layers; ++k) {
    const LatencyTable& t = *cb.layers[k].table;
    out.importance += vectors[cb.layers[k].dim].values[chosen[k] - 1];
    out.latency += t.data[(in - 1) * t.shape[1] + (chosen[k] - 1)];
    in = chosen[k];
  }
  if (options) options->assign(chosen.begin(), chosen.end());
  return out;
}

KeptResponse transformer_response(const PruningProblem& problem,
                                  const CompiledBlock& cb, double weight,
                                  double lambda, const int* dim_fix,
                                  std::vector<int>* options) {
  const auto& vectors = problem.vectors();
  const auto& ie = vectors[cb.slots[kEmb]].values;
  const auto& ih = vectors[cb.slots[kHead]].values;
  const auto& iq = vectors[cb.slots[kQk]].values;
  const auto& iv = vectors[cb.slots[kV]].values;
  const auto& im = vectors[cb.slots[kMlp]].values;
  const LatencyTable& tqk = *cb.qk;
  const LatencyTable& tvp = *cb.vproj;
  const LatencyTable& tmlp = *cb.mlp;

  const Range re = allowed(dim_fix, cb.slots[kEmb], static_cast<int>(ie.size()));
  const Range rh = allowed(dim_fix, cb.slots[kHead], static_cast<int>(ih.size()));
  const Range rq = allowed(dim_fix, cb.slots[kQk], static_cast<int>(iq.size()));
  const Range rv = allowed(dim_fix, cb.slots[kV], static_cast<int>(iv.size()));
  const Range rm = allowed(dim_fix, cb.slots[kMlp], static_cast<int>(im.size()));

  double best = kNegInf;
  std::array<int, 5> arg{re.lo, rh.lo, rq.lo, rv.lo, rm.lo};
  for (int e = re.lo; e <= re.hi; ++e) {
    double bm = kNegInf;
    int am = rm.lo;
    for (int m = rm.lo; m <= rm.hi; ++m) {
      const double v = weight * im[m - 1] - lambda * tmlp.at(e - 1, m - 1);
      if (v > bm) bm = v, am = m;
    }
    for (int h = rh.lo; h <= rh.hi; ++h) {
      double bq = kNegInf, bv = kNegInf;
      int aq = rq.lo, av = rv.lo;
      for (int q = rq.lo; q <= rq.hi; ++q) {
        const double v = weight * iq[q - 1] - lambda * tqk.at(e - 1, h - 1, q - 1);
        if (v > bq) bq = v, aq = q;
      }
      for (int v = rv.lo; v <= rv.hi; ++v) {
        const double s = weight * iv[v - 1] - lambda * tvp.at(e - 1, h - 1, v - 1);
        if (s > bv) bv = s, av = v;
      }
      const double total = weight * (ie[e - 1] + ih[h - 1]) + bq + bv + bm;
      if (total > best) {
        best = total;
        arg = {e, h, aq, av, am};
      }
    }
  }
  KeptResponse out;
  out.score = best;
  out.importance = ie[arg[kEmb] - 1] + ih[arg[kHead] - 1] + iq[arg[kQk] - 1] +
                   iv[arg[kV] - 1] + im[arg[kMlp] - 1];
  out.latency = tqk.at(arg[kEmb] - 1, arg[kHead] - 1, arg[kQk] - 1) +
                tvp.at(arg[kEmb] - 1, arg[kHead] - 1, arg[kV] - 1) +
                tmlp.at(arg[kEmb] - 1, arg[kMlp] - 1);
  if (options) {
    options->assign(5, 1);
    for (int s = 0; s < 5; ++s) (*options)[cb.slot_pos[s]] = arg[s];
  }
  return out;
}

}  // namespace

KeptResponse best_kept_state(const PruningProblem& problem, std::size_t block,
                             double weight, double lambda, const int* dim_fix,
                             std::vector<int>* options) {
  const auto& cb = problem.blocks()[block];
  if (cb.kind == BlockKind::cnn_chain)
    return chain_response(problem, cb, weight, lambda, dim_fix, options);
  return transformer_response(problem, cb, weight, lambda, dim_fix, options);
}

void apply_block_options(const ArchitectureSpec& arch, std::size_t block,
                         const std::vector<int>& options, Assignment& a) {
  const auto& dims = arch.resolved()[block].dims;
  for (std::size_t k = 0; k < dims.size(); ++k) a.omega[dims[k]] = options[k];
}

Assignment min_latency_assignment(const PruningProblem& problem) {
  const auto& arch = problem.arch();
  Assignment a = full_assignment(arch);
  std::vector<int> options;
  for (std::size_t b = 0; b < arch.block_count(); ++b) {
    if (arch.blocks()[b].removable) {
      a.kappa[b] = 0;
      for (std::size_t di : arch.resolved()[b].dims) a.omega[di] = 1;
      continue;
    }
    best_kept_state(problem, b, 0.0, 1.0, nullptr, &options);
    apply_block_options(arch, b, options, a);
  }
  return a;
}

}  // namespace detail

BlockResponse block_best_response(const PruningProblem& problem,
                                  std::size_t block, double lambda,
                                  const Fixings& fixings) {
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be nonnegative");
  if (block >= problem.blocks().size()) throw ArgumentError("block out of range");
  const auto& cb = problem.blocks()[block];
  const std::int8_t kfix = cb.removable ? fixings.blocks[block] : std::int8_t{1};

  BlockResponse out;
  const std::size_t n = problem.arch().resolved()[block].dims.size();
  if (kfix == 0) {
    out.options.assign(n, 1);
    return out;
  }
  const auto kept = detail::best_kept_state(problem, block, 1.0, lambda,
                                            fixings.dims.data(), &out.options);
  // Kept wins ties against removal.
  if (kfix == 1 || kept.score >= 0.0) {
    out.score = kept.score;
    out.importance = kept.importance;
    out.latency = kept.latency;
    out.kept = true;
  } else {
    out.options.assign(n, 1);
  }
  return out;
}

BlockResponse block_best_response(const PruningProblem& problem,
                                  std::size_t block, double lambda) {
  return block_best_response(problem, block, lambda,
                             Fixings::none(problem.arch()));
}

double dual_bound(const PruningProblem& problem, double lambda,
                  const Fixings& fixings) {
  double total = 0.0;
  for (std::size_t b = 0; b < problem.blocks().size(); ++b)
    total += block_best_response(problem, b, lambda, fixings).score;
  if (lambda > 0.0) total += lambda * problem.budget();
  return total;
}

double dual_bound(const PruningProblem& problem, double lambda) {
  return dual_bound(problem, lambda, Fixings::none(problem.arch()));
}

DualSearchResult minimize_dual_bound(const PruningProblem& problem,
                                     int iterations) {
  const Fixings none = Fixings::none(problem.arch());
  DualSearchResult best{dual_bound(problem, 0.0, none), 0.0};
  double lo = 0.0, hi = problem.lambda_max();
  if (!(hi > 0.0) || !std::isfinite(problem.budget())) return best;
  auto eval = [&](double lambda) {
    const double v = dual_bound(problem, lambda, none);
    if (v < best.bound) best = {v, lambda};
    return v;
  };
  eval(hi);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo), x2 = lo + kInvPhi * (hi - lo);
  double f1 = eval(x1), f2 = eval(x2);
  for (int it = 2; it < iterations; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1, f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2, f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = eval(x2);
    }
  }
  return best;
}

}  // namespace mdp
