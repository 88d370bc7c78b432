// l1sub: solve single instances, run multi-trial experiments, and check the
// convergence properties from the command line.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l1sub/l1sub.hpp"

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct ProblemFlags {
  std::optional<std::size_t> n, m, k;
  double r = 5.0;
  std::optional<double> gamma;
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& pf) {
  cmd->add_option("--n", pf.n, "variable dimension (default: family size)");
  cmd->add_option("--m", pf.m, "rows of the data matrix (lasso, logistic)");
  cmd->add_option("--k", pf.k, "number of affine terms (logsumexp)");
  cmd->add_option("--r", pf.r, "smoothing parameter (logsumexp)")->capture_default_str();
  cmd->add_option("--gamma", pf.gamma, "l1 weight (overrides the family default)");
}

struct ClassicFlags {
  std::optional<double> scale, exponent;
  std::optional<bool> normalized;
};

void add_classic_flags(CLI::App* cmd, ClassicFlags& cf) {
  cmd->add_option("--classic-scale", cf.scale, "classic step h_k = scale * k^-exponent");
  cmd->add_option("--classic-exponent", cf.exponent, "classic step decay exponent");
  cmd->add_option("--classic-normalized", cf.normalized,
                  "use h_k as a step length along d/|d| (default: on except toy2d)");
}

l1sub::ProblemParams to_params(const ProblemFlags& pf) {
  // Explicit zeros are rejected here; the library reads 0 as "default".
  auto size = [](const std::optional<std::size_t>& v, const char* name) -> std::size_t {
    if (v && *v == 0) throw std::invalid_argument(std::string("--") + name + " must be >= 1");
    return v.value_or(0);
  };
  l1sub::ProblemParams p;
  p.n = size(pf.n, "n");
  p.m = size(pf.m, "m");
  p.k = size(pf.k, "k");
  if (!(pf.r > 0.0)) throw std::invalid_argument("--r must be positive");
  p.r = pf.r;
  p.gamma = pf.gamma;
  return p;
}

std::optional<double> parse_step(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t used = 0;
  const double h = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad step '" + s + "'");
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  return h;
}

std::vector<l1sub::Method> parse_solvers(const std::string& list) {
  std::vector<l1sub::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto m = l1sub::parse_method(item);
    if (!m) throw std::invalid_argument("unknown solver '" + item + "'");
    out.push_back(*m);
  }
  return out;
}

std::string fmt(double v) { return l1sub::detail::fmt_double(v); }

struct SolveFlags {
  std::string problem = "toy2d";
  std::string solver = "alg1";
  ProblemFlags pf;
  ClassicFlags cf;
  std::int64_t iters = 1000;
  std::uint64_t seed = 0;
  std::string step = "auto";
  std::string out;
  std::string dump;
};

int run_solve(const SolveFlags& f) {
  l1sub::ExperimentConfig cfg;
  cfg.experiment = f.problem;
  cfg.params = to_params(f.pf);
  const auto method = l1sub::parse_method(f.solver);
  if (!method) throw std::invalid_argument("unknown solver '" + f.solver + "'");
  cfg.solvers = {*method};
  cfg.max_iter = f.iters;
  cfg.base_seed = f.seed;
  cfg.step_h = parse_step(f.step);
  cfg.classic_step_scale = f.cf.scale;
  cfg.classic_step_exponent = f.cf.exponent;
  cfg.classic_normalized = f.cf.normalized;
  cfg.validate();

  // Construct once up front so bad dimensions surface as usage errors.
  l1sub::Rng rng(cfg.trial_seed(0));
  const l1sub::ProblemInstance inst = l1sub::make_problem(cfg.experiment, cfg.params, rng);
  if (!f.dump.empty()) {
    std::ofstream os(f.dump);
    if (!os) throw std::invalid_argument("cannot open " + f.dump);
    l1sub::dump_instance(os, inst);
  }

  l1sub::ExperimentResult res;
  res.trials.push_back(l1sub::run_trial(cfg, 0));
  const auto& tr = res.trials.front();
  if (tr.error) {
    std::cerr << "solve failed: " << *tr.error << '\n';
    return kExitNumerical;
  }
  res.curve.trials = 1;
  res.curve.certified = tr.reference.certified;

  if (!f.out.empty()) {
    std::ofstream os(f.out);
    if (!os) throw std::invalid_argument("cannot open " + f.out);
    l1sub::write_trials_csv(os, cfg, res);
  }

  const auto& x = tr.traces.front().final_x;
  const double fx = l1sub::f_value(inst.objective, x);
  const double dn = l1sub::norm2(l1sub::min_norm_subgradient(inst.objective, x));
  std::ostream& summary = std::cout;
  summary << "problem=" << f.problem << " solver=" << f.solver << " iters=" << f.iters
          << " seed=" << f.seed << '\n';
  summary << "final_f=" << fmt(fx) << '\n';
  summary << "final_subgrad_norm=" << fmt(dn) << '\n';
  summary << "final_gap=" << fmt(fx - tr.reference.value)
          << " certified=" << (tr.reference.certified ? 1 : 0) << '\n';
  return 0;
}

struct BenchFlags {
  std::string experiment = "toy2d";
  ProblemFlags pf;
  ClassicFlags cf;
  int trials = 100;
  std::optional<std::int64_t> iters;
  std::uint64_t seed = 0;
  std::string solvers = "alg1,alg2,ista,fista,classic";
  std::string step = "auto";
  std::string out;
  int jobs = 1;
};

int run_bench(const BenchFlags& f) {
  l1sub::ExperimentConfig cfg;
  cfg.experiment = f.experiment;
  cfg.params = to_params(f.pf);
  cfg.solvers = parse_solvers(f.solvers);
  cfg.trials = f.trials;
  cfg.max_iter = f.iters.value_or(cfg.toy() ? 500 : 2000);
  cfg.base_seed = f.seed;
  cfg.step_h = parse_step(f.step);
  cfg.classic_step_scale = f.cf.scale;
  cfg.classic_step_exponent = f.cf.exponent;
  cfg.classic_normalized = f.cf.normalized;
  cfg.output = f.out;
  cfg.jobs = f.jobs;
  cfg.validate();
  {
    l1sub::Rng probe(cfg.trial_seed(0));
    (void)l1sub::make_problem(cfg.experiment, cfg.params, probe);
  }

  l1sub::ExperimentResult res;
  try {
    res = l1sub::run_experiment(cfg, &std::cerr);
  } catch (const l1sub::ExperimentError& e) {
    std::cerr << "bench failed: " << e.what() << '\n';
    return kExitNumerical;
  }

  std::printf("experiment=%s trials=%d iters=%lld aborted=%d certified=%d\n",
              cfg.experiment.c_str(), res.curve.trials, static_cast<long long>(cfg.max_iter),
              res.aborted, res.curve.certified ? 1 : 0);
  std::printf("%-8s %-24s\n", "solver", "final_mean_gap");
  for (const auto& [name, curve] : res.curve.mean_gap)
    std::printf("%-8s %-24s\n", name.c_str(), fmt(curve.back()).c_str());
  if (!cfg.output.empty()) std::printf("wrote %s\n", cfg.output.c_str());
  return 0;
}

int run_verify(const std::string& suite) {
  bool all_passed = true;
  bool matched = false;
  for (const auto& s : l1sub::verify::suites()) {
    if (suite != "all" && suite != s.name) continue;
    matched = true;
    const auto rep = s.run();
    all_passed = all_passed && rep.passed;
    std::printf("%s %-16s margin=%.3e checks=%lld %s\n", rep.passed ? "PASS" : "FAIL",
                rep.name.c_str(), rep.margin, static_cast<long long>(rep.checks),
                rep.detail.c_str());
  }
  if (!matched) throw std::invalid_argument("unknown suite '" + suite + "'");
  return all_passed ? 0 : kExitNumerical;
}

/// Replaces `--config <path>` after the bench subcommand with the file's
/// key=value lines as `--key=value` flags, placed before the remaining
/// arguments so that explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  const auto sub = std::find(args.begin(), args.end(), "bench");
  if (sub == args.end()) return args;
  for (auto it = sub + 1; it != args.end(); ++it) {
    std::string path;
    auto last = it + 1;
    if (*it == "--config") {
      if (last == args.end()) throw CLI::ArgumentMismatch("--config needs a path");
      path = *last++;
    } else if (it->rfind("--config=", 0) == 0) {
      path = it->substr(9);
    } else {
      continue;
    }
    std::ifstream is(path);
    if (!is) throw CLI::FileError::Missing(path);
    std::vector<std::string> flags;
    std::string line;
    while (std::getline(is, line)) {
      line = CLI::detail::trim_copy(line);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw CLI::ConversionError("config line without '=': " + line);
      flags.push_back("--" + CLI::detail::trim_copy(line.substr(0, eq)) + "=" +
                      CLI::detail::trim_copy(line.substr(eq + 1)));
    }
    const auto at = sub - args.begin() + 1;
    args.erase(it, last);
    args.insert(args.begin() + at, flags.begin(), flags.end());
    return args;
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l1-composite subgradient solvers and experiments", "l1sub"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(l1sub::kVersion));
  app.require_subcommand(1);

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "run one solver on one generated instance");
  solve->add_option("--problem", sf.problem, "problem family")
      ->check(CLI::IsMember(l1sub::problem_labels()))
      ->capture_default_str();
  solve->add_option("--solver", sf.solver, "alg1|alg2|ista|fista|classic")->capture_default_str();
  add_problem_flags(solve, sf.pf);
  add_classic_flags(solve, sf.cf);
  solve->add_option("--iters", sf.iters, "iterations")->capture_default_str();
  solve->add_option("--seed", sf.seed, "instance seed")->capture_default_str();
  solve->add_option("--step", sf.step, "auto (1/L) or a positive real")->capture_default_str();
  solve->add_option("--out", sf.out, "trace CSV path (default: no trace file)");
  solve->add_option("--dump", sf.dump, "write the generated instance to this path");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "average gap curves over seeded trials");
  std::string config_path;
  bench->add_option("--config", config_path,
                    "key=value file with the same keys as the flags (flags override it)");
  bench->add_option("--experiment", bf.experiment, "problem family")
      ->check(CLI::IsMember(l1sub::problem_labels()))
      ->capture_default_str();
  bench->add_option("--trials", bf.trials, "number of trials")->capture_default_str();
  bench->add_option("--iters", bf.iters, "iterations (default 500 for toy2d, else 2000)");
  bench->add_option("--seed", bf.seed, "base seed; trial t uses seed+t")->capture_default_str();
  bench->add_option("--solvers", bf.solvers, "comma-separated solvers")->capture_default_str();
  bench->add_option("--step", bf.step, "auto (1/L) or a positive real")->capture_default_str();
  bench->add_option("--out", bf.out, "aggregated CSV path; trials and meta files go beside it");
  bench->add_option("--jobs", bf.jobs, "worker threads")->capture_default_str();
  add_problem_flags(bench, bf.pf);
  add_classic_flags(bench, bf.cf);

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "run the property suites");
  std::vector<std::string> suite_names{"all"};
  for (const auto& s : l1sub::verify::suites()) suite_names.push_back(s.name);
  verify->add_option("--suite", suite, "property suite")
      ->check(CLI::IsMember(suite_names))
      ->capture_default_str();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return run_solve(sf);
    if (*bench) return run_bench(bf);
    return run_verify(suite);
  } catch (const l1sub::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
}
