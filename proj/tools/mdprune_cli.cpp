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

// mdprune command-line front end. Talks to the solver only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mdprune/mdprune.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;
constexpr int kExitInternal = 1;

struct Failure {
  int code;
  std::string message;
};

int exit_code(mdp_status s) {
  switch (s) {
    case MDP_OK: return kExitOk;
    case MDP_INFEASIBLE: return kExitInfeasible;
    case MDP_IO: return kExitIo;
    case MDP_VALIDATION:
    case MDP_INVALID_ARGUMENT:
    case MDP_LIMIT: return kExitValidation;
    case MDP_INTERNAL: break;
  }
  return kExitInternal;
}

void check(mdp_status s) {
  if (s != MDP_OK) throw Failure{exit_code(s), mdp_last_error()};
}

// Owning wrappers for C API handles and strings.
struct StringFree {
  void operator()(char* s) const { mdp_string_free(s); }
};
using CString = std::unique_ptr<char, StringFree>;

std::string take(char* s) {
  CString owner(s);
  return s ? std::string(s) : std::string();
}

struct BundleFree {
  void operator()(mdp_bundle* b) const { mdp_bundle_free(b); }
};
struct SolutionFree {
  void operator()(mdp_solution* s) const { mdp_solution_free(s); }
};
using Bundle = std::unique_ptr<mdp_bundle, BundleFree>;
using Solution = std::unique_ptr<mdp_solution, SolutionFree>;

std::string file_hash(const std::string& path) {
  char* hex = nullptr;
  check(mdp_sha256_file(path.c_str(), &hex));
  return take(hex);
}

std::string text_hash(const std::string& text) {
  char* hex = nullptr;
  check(mdp_sha256_buffer(text.data(), text.size(), &hex));
  return take(hex);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitIo, "cannot create directory '" + dir + "': " + ec.message()};
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kExitIo, "cannot open '" + path.string() + "' for writing"};
  out << content;
  if (!out) throw Failure{kExitIo, "cannot write '" + path.string() + "'"};
}

double parse_budget(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Failure{kExitValidation, "invalid budget '" + text + "'"};
  }
}

int parse_mode(const std::string& text) {
  if (text == "exhaustive") return MDP_MODE_EXHAUSTIVE;
  if (text == "branch_and_bound" || text == "bnb") return MDP_MODE_BRANCH_AND_BOUND;
  if (text == "heuristic_only" || text == "heuristic") return MDP_MODE_HEURISTIC_ONLY;
  throw Failure{kExitValidation, "unknown mode '" + text + "'"};
}

json budget_json(double b) { return std::isfinite(b) ? json(b) : json(nullptr); }

/// Inputs and parameters that determine the outputs. The thread count and
/// output location are recorded separately and do not enter the hash.
struct Manifest {
  json hashed = json::object();
  json context = json::object();

  void input(const char* key, const std::string& path) {
    hashed["inputs"][key] = file_hash(path);
    context["paths"][key] = path;
  }
  std::string sha256() const { return text_hash(hashed.dump()); }
  std::string document() const {
    json j = {{"manifest_sha256", sha256()}, {"hashed", hashed}, {"context", context}};
    return j.dump(2) + "\n";
  }
};

struct SolveOptions {
  std::string arch, scores, lut, budget = "inf", mode = "branch_and_bound", out;
  double time_limit = 60.0;
  double tolerance = 0.0;
  int lambda_iters = 64;
  int threads = 1;
  std::uint64_t seed = 0;
};

mdp_config make_config(const SolveOptions& o) {
  mdp_config c;
  mdp_config_default(&c);
  c.mode = parse_mode(o.mode);
  c.time_limit = o.time_limit;
  c.lambda_iters = o.lambda_iters;
  c.tolerance = o.tolerance;
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

void add_solver_flags(CLI::App* cmd, SolveOptions& o) {
  cmd->add_option("--arch", o.arch, "Architecture JSON")->required();
  cmd->add_option("--scores", o.scores, "Element scores JSON")->required();
  cmd->add_option("--lut", o.lut, "Latency tables JSON")->required();
  cmd->add_option("--mode", o.mode, "exhaustive | branch_and_bound | heuristic_only")
      ->capture_default_str();
  cmd->add_option("--time-limit", o.time_limit, "Solver time limit in seconds")
      ->capture_default_str();
  cmd->add_option("--tolerance", o.tolerance, "Absolute optimality gap")->capture_default_str();
  cmd->add_option("--lambda-iters", o.lambda_iters, "Multiplier search iterations")
      ->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Solver seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->required();
}

Manifest solve_manifest(const char* command, const SolveOptions& o, const mdp_config& c) {
  Manifest m;
  m.hashed["command"] = command;
  m.input("arch", o.arch);
  m.input("scores", o.scores);
  m.input("lut", o.lut);
  m.hashed["solver"] = {{"mode", o.mode},
                        {"time_limit", c.time_limit},
                        {"lambda_iters", c.lambda_iters},
                        {"tolerance", c.tolerance},
                        {"seed", c.seed}};
  m.context["threads"] = c.threads;
  m.context["out"] = o.out;
  return m;
}

int cmd_solve(const SolveOptions& o) {
  const double budget = parse_budget(o.budget);
  const mdp_config config = make_config(o);
  Manifest manifest = solve_manifest("solve", o, config);
  manifest.hashed["budget_ms"] = budget_json(budget);
  const std::string hash = manifest.sha256();

  mdp_bundle* raw_bundle = nullptr;
  check(mdp_bundle_open(o.arch.c_str(), o.scores.c_str(), o.lut.c_str(), budget, &raw_bundle));
  Bundle bundle(raw_bundle);

  mdp_solution* raw_sol = nullptr;
  const mdp_status st = mdp_solve(bundle.get(), &config, &raw_sol);
  if (st != MDP_OK && st != MDP_INFEASIBLE) check(st);
  Solution sol(raw_sol);

  ensure_dir(o.out);
  const fs::path out(o.out);
  write_text(out / "manifest.json", manifest.document());
  char* report = nullptr;
  check(mdp_solution_report(bundle.get(), sol.get(), &config, hash.c_str(), &report));
  write_text(out / "report.json", take(report));
  json timing = {{"manifest_sha256", hash},
                 {"wall_time_s", mdp_solution_wall_time(sol.get())},
                 {"threads", config.threads}};
  write_text(out / "timing.json", timing.dump(2) + "\n");

  if (st == MDP_INFEASIBLE) {
    std::error_code ec;
    for (const char* f : {"structure.json", "summary.txt", "summary.csv", "assignment.csv"})
      fs::remove(out / f, ec);
    std::cerr << "infeasible: " << mdp_solution_message(sol.get()) << '\n';
    return kExitInfeasible;
  }

  char* csv = nullptr;
  check(mdp_solution_assignment_csv(bundle.get(), sol.get(), &csv));
  write_text(out / "assignment.csv", "# manifest_sha256: " + hash + "\n" + take(csv));
  char *structure = nullptr, *text = nullptr, *summary_csv = nullptr;
  check(mdp_solution_extract(bundle.get(), sol.get(), hash.c_str(), &structure, &text,
                             &summary_csv));
  write_text(out / "structure.json", take(structure));
  const std::string summary = take(text);
  write_text(out / "summary.txt", summary);
  write_text(out / "summary.csv", take(summary_csv));

  const int status = mdp_solution_status(sol.get());
  std::cout << (status == MDP_SOLVE_OPTIMAL ? "optimal" : "feasible_heuristic")
            << " importance=" << mdp_solution_importance(sol.get())
            << " latency_ms=" << mdp_solution_latency(sol.get())
            << " nodes=" << mdp_solution_node_count(sol.get()) << '\n'
            << summary;
  return kExitOk;
}

std::vector<double> sweep_budgets(const std::vector<std::string>& list, double lo,
                                  double hi, int points) {
  std::vector<double> out;
  for (const auto& s : list) out.push_back(parse_budget(s));
  if (points > 0) {
    if (!(lo > 0.0) || !(hi >= lo))
      throw Failure{kExitValidation, "sweep range needs 0 < --budget-min <= --budget-max"};
    for (int i = 0; i < points; ++i)
      out.push_back(points == 1 ? hi : lo + (hi - lo) * i / (points - 1));
  }
  if (out.empty()) throw Failure{kExitValidation, "no budgets given (use --budgets or --points)"};
  return out;
}

int cmd_sweep(const SolveOptions& o, const std::vector<double>& budgets) {
  const mdp_config config = make_config(o);
  Manifest manifest = solve_manifest("sweep", o, config);
  json jb = json::array();
  for (double b : budgets) jb.push_back(budget_json(b));
  manifest.hashed["budgets_ms"] = jb;
  const std::string hash = manifest.sha256();

  // The first budget validates the inputs; later ones reuse them.
  mdp_bundle* raw = nullptr;
  check(mdp_bundle_open(o.arch.c_str(), o.scores.c_str(), o.lut.c_str(), budgets.front(), &raw));
  Bundle base(raw);

  std::ostringstream csv;
  csv.precision(17);
  csv << "# manifest_sha256: " << hash << '\n'
      << "budget_ms,status,importance,latency_ms,bound,node_count\n";
  std::ostringstream timing;
  timing.precision(17);
  timing << "budget_ms,wall_time_s\n";
  for (double b : budgets) {
    mdp_bundle* rb = nullptr;
    check(mdp_bundle_with_budget(base.get(), b, &rb));
    Bundle bundle(rb);
    mdp_solution* rs = nullptr;
    const mdp_status st = mdp_solve(bundle.get(), &config, &rs);
    if (st != MDP_OK && st != MDP_INFEASIBLE) check(st);
    Solution sol(rs);
    static constexpr const char* kNames[] = {"optimal", "feasible_heuristic", "infeasible"};
    csv << b << ',' << kNames[mdp_solution_status(sol.get())] << ',';
    if (st == MDP_INFEASIBLE)
      csv << ",,,";
    else
      csv << mdp_solution_importance(sol.get()) << ',' << mdp_solution_latency(sol.get()) << ','
          << mdp_solution_bound(sol.get()) << ',';
    csv << mdp_solution_node_count(sol.get()) << '\n';
    timing << b << ',' << mdp_solution_wall_time(sol.get()) << '\n';
  }
  ensure_dir(o.out);
  const fs::path out(o.out);
  write_text(out / "manifest.json", manifest.document());
  write_text(out / "sweep.csv", csv.str());
  write_text(out / "timing.csv", timing.str());
  std::cout << csv.str();
  return kExitOk;
}

struct SynthOptions {
  std::string arch, out, dist = "uniform";
  std::uint64_t seed = 0;
  mdp_cost_params params{};
};

int cmd_synth(SynthOptions& o) {
  int dist;
  if (o.dist == "uniform")
    dist = MDP_SCORES_UNIFORM;
  else if (o.dist == "exponential")
    dist = MDP_SCORES_EXPONENTIAL;
  else
    throw Failure{kExitValidation, "unknown score distribution '" + o.dist + "'"};
  Manifest m;
  m.hashed["command"] = "synth";
  m.input("arch", o.arch);
  m.hashed["seed"] = o.seed;
  m.hashed["scores"] = o.dist;
  m.hashed["cost_model"] = {{"unit_cost", o.params.unit_cost}, {"overhead", o.params.overhead},
                            {"tile", o.params.tile},           {"spatial", o.params.spatial},
                            {"noise", o.params.noise}};
  m.context["out"] = o.out;
  const std::string hash = m.sha256();
  char *scores = nullptr, *lut = nullptr;
  check(mdp_synth(o.arch.c_str(), o.seed, dist, &o.params, hash.c_str(), &scores, &lut));
  const std::string s = take(scores), l = take(lut);
  ensure_dir(o.out);
  const fs::path out(o.out);
  write_text(out / "scores.json", s);
  write_text(out / "lut.json", l);
  write_text(out / "manifest.json", m.document());
  std::cout << "wrote " << (out / "scores.json").string() << " and "
            << (out / "lut.json").string() << '\n';
  return kExitOk;
}

int cmd_check(const std::string& arch, const std::string& scores, const std::string& lut) {
  char* report = nullptr;
  const mdp_status st = mdp_check(arch.c_str(), scores.empty() ? nullptr : scores.c_str(),
                                  lut.empty() ? nullptr : lut.c_str(), &report);
  if (!report) check(st);
  std::cout << take(report);
  return exit_code(st);
}

int cmd_compare(const std::string& arch, const std::string& lut, const std::string& trajectory,
                int steps, const std::string& out_dir) {
  Manifest m;
  m.hashed["command"] = "compare-latency-models";
  m.input("arch", arch);
  m.input("lut", lut);
  if (!trajectory.empty())
    m.input("trajectory", trajectory);
  else
    m.hashed["uniform_steps"] = steps;
  m.context["out"] = out_dir;
  const std::string hash = m.sha256();
  char* csv = nullptr;
  check(mdp_compare_latency_models(arch.c_str(), lut.c_str(),
                                   trajectory.empty() ? nullptr : trajectory.c_str(), steps,
                                   hash.c_str(), &csv));
  const std::string text = take(csv);
  ensure_dir(out_dir);
  write_text(fs::path(out_dir) / "latency_models.csv", text);
  write_text(fs::path(out_dir) / "manifest.json", m.document());
  std::cout << text;
  return kExitOk;
}

int cmd_extract(const std::string& arch, const std::string& scores, const std::string& lut,
                const std::string& report, const std::string& out_dir) {
  Manifest m;
  m.hashed["command"] = "extract";
  m.input("arch", arch);
  m.input("scores", scores);
  m.input("lut", lut);
  m.input("report", report);
  m.context["out"] = out_dir;
  const std::string hash = m.sha256();

  mdp_bundle* rb = nullptr;
  check(mdp_bundle_open(arch.c_str(), scores.c_str(), lut.c_str(),
                        std::numeric_limits<double>::infinity(), &rb));
  Bundle bundle(rb);
  mdp_solution* rs = nullptr;
  check(mdp_solution_load(bundle.get(), report.c_str(), &rs));
  Solution sol(rs);
  if (mdp_solution_status(sol.get()) == MDP_SOLVE_INFEASIBLE)
    throw Failure{kExitInfeasible, "report describes an infeasible solve; nothing to extract"};
  char *structure = nullptr, *text = nullptr, *summary_csv = nullptr;
  check(mdp_solution_extract(bundle.get(), sol.get(), hash.c_str(), &structure, &text,
                             &summary_csv));
  ensure_dir(out_dir);
  const fs::path out(out_dir);
  write_text(out / "structure.json", take(structure));
  const std::string summary = take(text);
  write_text(out / "summary.txt", summary);
  write_text(out / "summary.csv", take(summary_csv));
  write_text(out / "manifest.json", m.document());
  std::cout << summary;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency-constrained multi-dimensional pruning planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mdp_version()));

  SolveOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "Solve for one latency budget");
  add_solver_flags(solve, solve_opts);
  solve->add_option("--budget-ms", solve_opts.budget, "Latency budget in ms (or 'inf')")
      ->required();

  SolveOptions sweep_opts;
  std::vector<std::string> sweep_list;
  double sweep_lo = 0.0, sweep_hi = 0.0;
  int sweep_points = 0;
  auto* sweep = app.add_subcommand("sweep", "Solve across a range of budgets");
  add_solver_flags(sweep, sweep_opts);
  sweep->add_option("--budget-ms,--budgets", sweep_list, "Budgets in ms")->delimiter(',');
  sweep->add_option("--budget-min", sweep_lo, "Smallest budget of an even grid");
  sweep->add_option("--budget-max", sweep_hi, "Largest budget of an even grid");
  sweep->add_option("--points", sweep_points, "Grid points between min and max");

  SynthOptions synth_opts;
  mdp_cost_params_default(&synth_opts.params);
  auto* synth = app.add_subcommand("synth", "Generate synthetic scores and latency tables");
  synth->add_option("--arch", synth_opts.arch, "Architecture JSON")->required();
  synth->add_option("--seed", synth_opts.seed, "Generator seed")->capture_default_str();
  synth->add_option("--out", synth_opts.out, "Output directory")->required();
  synth->add_option("--score-dist", synth_opts.dist, "uniform | exponential")
      ->capture_default_str();
  synth->add_option("--unit-cost", synth_opts.params.unit_cost, "ms per MAC")
      ->capture_default_str();
  synth->add_option("--overhead", synth_opts.params.overhead, "ms per kernel")
      ->capture_default_str();
  synth->add_option("--tile", synth_opts.params.tile, "Hardware tile width")
      ->capture_default_str();
  synth->add_option("--spatial", synth_opts.params.spatial, "Spatial size factor")
      ->capture_default_str();
  synth->add_option("--noise", synth_opts.params.noise, "Relative noise amplitude")
      ->capture_default_str();

  std::string check_arch, check_scores, check_lut;
  auto* check_cmd = app.add_subcommand("check", "Validate input files without solving");
  check_cmd->add_option("--arch", check_arch, "Architecture JSON")->required();
  check_cmd->add_option("--scores", check_scores, "Element scores JSON");
  check_cmd->add_option("--lut", check_lut, "Latency tables JSON");

  std::string cmp_arch, cmp_lut, cmp_traj, cmp_out;
  int cmp_steps = 4;
  auto* compare = app.add_subcommand("compare-latency-models",
                                     "Linear per-channel model against table lookups");
  compare->add_option("--arch", cmp_arch, "Architecture JSON")->required();
  compare->add_option("--lut", cmp_lut, "Latency tables JSON")->required();
  compare->add_option("--trajectory", cmp_traj, "Pruning trajectory JSON");
  compare->add_option("--steps", cmp_steps, "Even shrink steps when no trajectory is given")
      ->capture_default_str();
  compare->add_option("--out", cmp_out, "Output directory")->required();

  std::string ex_arch, ex_scores, ex_lut, ex_report, ex_out;
  auto* extract = app.add_subcommand("extract", "Pruned structure from a solver report");
  extract->add_option("--arch", ex_arch, "Architecture JSON")->required();
  extract->add_option("--scores", ex_scores, "Element scores JSON")->required();
  extract->add_option("--lut", ex_lut, "Latency tables JSON")->required();
  extract->add_option("--report", ex_report, "report.json written by solve")->required();
  extract->add_option("--out", ex_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*solve) return cmd_solve(solve_opts);
    if (*sweep)
      return cmd_sweep(sweep_opts, sweep_budgets(sweep_list, sweep_lo, sweep_hi, sweep_points));
    if (*synth) return cmd_synth(synth_opts);
    if (*check_cmd) return cmd_check(check_arch, check_scores, check_lut);
    if (*compare) return cmd_compare(cmp_arch, cmp_lut, cmp_traj, cmp_steps, cmp_out);
    if (*extract) return cmd_extract(ex_arch, ex_scores, ex_lut, ex_report, ex_out);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitValidation;
}
