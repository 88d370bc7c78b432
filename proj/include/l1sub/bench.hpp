// Experiment orchestration: per-trial reference optima, multi-trial gap
// curves and CSV emission.

#ifndef L1SUB_BENCH_HPP
#define L1SUB_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "numerics.hpp"
#include "objective.hpp"
#include "problems.hpp"
#include "solvers.hpp"
#include "version.hpp"

namespace l1sub {

struct ReferenceOptions {
  std::int64_t fista_budget = 50000;
  std::int64_t polish_cap = 20000;
  double tolerance = 1e-10;  // on |d(x)|_2, d the minimal-norm subgradient
  std::int64_t check_every = 20;
};

struct ReferenceResult {
  double value = 0.0;
  double subgrad_norm = 0.0;
  bool certified = false;
  Vector x;
};

/// Optimal value of an instance: the analytic value when one is attached,
/// otherwise FISTA with restart followed by a polish with the constant-step
/// subgradient method. `certified` reports whether the minimal-norm
/// subgradient dropped below the tolerance.
inline ReferenceResult reference_optimum(const ProblemInstance& inst,
                                         const ReferenceOptions& opt = {},
                                         bool use_analytic = true) {
  const auto& obj = inst.objective;
  if (use_analytic && inst.f_ref) {
    ReferenceResult res;
    res.value = *inst.f_ref;
    res.certified = true;
    if (inst.x_star) {
      res.x = *inst.x_star;
      res.subgrad_norm = norm2(min_norm_subgradient(obj, res.x));
    }
    return res;
  }

  const double h = 1.0 / obj.lipschitz();
  Vector best_x = inst.x0;
  double best_f = f_value(obj, best_x);
  auto consider = [&](const Vector& x, double f) {
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  };

  double dnorm = norm2(min_norm_subgradient(obj, best_x));
  FistaState s = fista_init(inst.x0);
  for (std::int64_t k = 1; k <= opt.fista_budget && dnorm >= opt.tolerance; ++k) {
    s = fista_restart_step(obj, s, h);
    if (k % opt.check_every == 0 || k == opt.fista_budget) {
      consider(s.x, f_value(obj, s.x));
      dnorm = norm2(min_norm_subgradient(obj, s.x));
    }
  }
  consider(s.x, f_value(obj, s.x));

  Vector x = best_x;
  Vector grad = obj.grad_g(x);
  dnorm = norm2(min_norm_subgradient_from_gradient(x, grad, obj.gamma()));
  for (std::int64_t k = 0; k < opt.polish_cap && dnorm >= opt.tolerance; ++k) {
    auto phase = subgradient_phase(obj, x, h, grad);
    if (phase.next == x) break;
    x = std::move(phase.next);
    consider(x, phase.f_next);
    grad = obj.grad_g(x);
    dnorm = norm2(min_norm_subgradient_from_gradient(x, grad, obj.gamma()));
  }

  ReferenceResult res;
  res.value = best_f;
  res.x = best_x;
  res.subgrad_norm = std::min(dnorm, norm2(min_norm_subgradient(obj, best_x)));
  res.certified = res.subgrad_norm < opt.tolerance;
  return res;
}

/// The decaying raw schedule 10 k^-1/4 exceeds 2/L by orders of magnitude on
/// the four large families and diverges, so those use it as a step length.
inline bool default_classic_normalized(const std::string& label) {
  return label.rfind("toy2d", 0) != 0;
}

enum class ReferencePolicy { analytic, long_run };

struct ExperimentConfig {
  std::string experiment = "toy2d";
  ProblemParams params;
  std::vector<Method> solvers{Method::alg1, Method::alg2, Method::ista, Method::fista_restart,
                              Method::classic_subgrad};
  int trials = 1;
  std::int64_t max_iter = 500;
  std::uint64_t base_seed = 0;
  ReferencePolicy reference = ReferencePolicy::analytic;
  ReferenceOptions reference_options;
  std::optional<double> step_h;
  std::optional<double> classic_step_scale;     // default depends on the experiment
  std::optional<double> classic_step_exponent;  // ditto
  std::optional<bool> classic_normalized;       // ditto
  std::string output;  // aggregated CSV path; empty means no files
  int jobs = 1;

  bool toy() const { return experiment.rfind("toy2d", 0) == 0; }
  double classic_scale() const { return classic_step_scale.value_or(toy() ? 1.0 : 10.0); }
  double classic_exponent() const { return classic_step_exponent.value_or(toy() ? 1.0 : 0.25); }
  bool classic_normalize() const {
    return classic_normalized.value_or(default_classic_normalized(experiment));
  }

  /// Trial t uses seed base_seed + t.
  std::uint64_t trial_seed(int t) const { return base_seed + static_cast<std::uint64_t>(t); }

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (max_iter < 0) throw std::invalid_argument("iters must be >= 0");
    if (solvers.empty()) throw std::invalid_argument("at least one solver is required");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (std::find(problem_labels().begin(), problem_labels().end(), experiment) ==
        problem_labels().end())
      throw std::invalid_argument("unknown experiment '" + experiment + "'");
  }
};

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  ReferenceResult reference;
  std::vector<IterationTrace> traces;  // same order as the config's solvers
  std::optional<std::string> error;
};

struct GapCurve {
  std::map<std::string, std::vector<double>> mean_gap;  // solver -> per-iteration mean
  int trials = 0;  // completed trials contributing to the mean
  bool certified = true;  // every contributing reference was certified
};

struct ExperimentResult {
  GapCurve curve;
  std::vector<TrialResult> trials;
  int aborted = 0;
};

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline TrialResult run_trial(const ExperimentConfig& cfg, int t) {
  TrialResult tr;
  tr.trial = t;
  tr.seed = cfg.trial_seed(t);
  try {
    Rng rng(tr.seed);
    const ProblemInstance inst = make_problem(cfg.experiment, cfg.params, rng);
    tr.reference = reference_optimum(inst, cfg.reference_options,
                                     cfg.reference == ReferencePolicy::analytic);
    for (Method m : cfg.solvers) {
      SolverConfig sc;
      sc.method = m;
      sc.step_h = cfg.step_h;
      sc.max_iter = cfg.max_iter;
      sc.classic_step_scale = cfg.classic_scale();
      sc.classic_step_exponent = cfg.classic_exponent();
      sc.classic_normalized = cfg.classic_normalize();
      tr.traces.push_back(run(inst.objective, inst.x0, sc, std::nullopt, cfg.experiment, tr.seed));
    }
    // An uncertified long run is replaced by the best value seen on this
    // instance, so no gap goes negative. A certified one is kept as is and
    // gaps may dip below zero by rounding only.
    double ref = tr.reference.value;
    if (!tr.reference.certified)
      for (const auto& trace : tr.traces)
        for (const auto& r : trace.records) ref = std::min(ref, r.f_value);
    tr.reference.value = ref;
    for (auto& trace : tr.traces)
      for (auto& r : trace.records) r.gap = r.f_value - ref;
  } catch (const std::exception& e) {
    tr.error = e.what();
    tr.traces.clear();
  }
  return tr;
}

namespace detail {

inline std::vector<std::size_t> solver_order(const std::vector<Method>& solvers) {
  std::vector<std::size_t> idx(solvers.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return method_name(solvers[a]) < method_name(solvers[b]);
  });
  return idx;
}

inline std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  auto p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

}  // namespace detail

/// Per-trial CSV written next to the aggregated file.
inline std::filesystem::path trials_path(const std::filesystem::path& out) {
  return detail::sibling(out, "_trials.csv");
}

/// Sidecar metadata written next to the aggregated file.
inline std::filesystem::path meta_path(const std::filesystem::path& out) {
  return detail::sibling(out, "_meta.txt");
}

inline void write_trials_csv(std::ostream& os, const ExperimentConfig& cfg,
                             const ExperimentResult& res) {
  os << "experiment,solver,trial,iter,f_value,gap,certified\n";
  for (std::size_t s : detail::solver_order(cfg.solvers)) {
    for (const auto& tr : res.trials) {
      if (tr.error) continue;
      const auto& trace = tr.traces[s];
      for (const auto& r : trace.records) {
        os << cfg.experiment << ',' << method_name(cfg.solvers[s]) << ',' << tr.trial << ','
           << r.k << ',' << detail::fmt_double(r.f_value) << ','
           << detail::fmt_double(r.gap.value_or(std::numeric_limits<double>::quiet_NaN())) << ','
           << (tr.reference.certified ? 1 : 0) << '\n';
      }
    }
  }
}

inline void write_aggregate_csv(std::ostream& os, const ExperimentConfig& cfg,
                                const ExperimentResult& res) {
  os << "experiment,solver,iter,mean_gap,trials\n";
  for (std::size_t s : detail::solver_order(cfg.solvers)) {
    const std::string name(method_name(cfg.solvers[s]));
    const auto& curve = res.curve.mean_gap.at(name);
    for (std::size_t k = 0; k < curve.size(); ++k)
      os << cfg.experiment << ',' << name << ',' << k << ',' << detail::fmt_double(curve[k])
         << ',' << res.curve.trials << '\n';
  }
}

inline void write_meta(std::ostream& os, const ExperimentConfig& cfg, const ExperimentResult& res) {
  const auto& p = cfg.params;
  os << "experiment=" << cfg.experiment << '\n';
  os << "n=" << p.n << "\nm=" << p.m << "\nk=" << p.k << "\nr=" << detail::fmt_double(p.r) << '\n';
  os << "gamma=" << detail::fmt_optional(p.gamma) << '\n';
  os << "solvers=";
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i)
    os << (i ? "," : "") << method_name(cfg.solvers[i]);
  os << "\ntrials=" << cfg.trials << "\niters=" << cfg.max_iter << '\n';
  os << "base_seed=" << cfg.base_seed << "\nseed_policy=base_seed+trial\n";
  os << "reference="
     << (cfg.reference == ReferencePolicy::analytic ? "analytic" : "long-run") << '\n';
  os << "reference_fista_budget=" << cfg.reference_options.fista_budget << '\n';
  os << "reference_polish_cap=" << cfg.reference_options.polish_cap << '\n';
  os << "reference_tolerance=" << detail::fmt_double(cfg.reference_options.tolerance) << '\n';
  os << "step=" << (cfg.step_h ? detail::fmt_double(*cfg.step_h) : std::string("auto")) << '\n';
  os << "classic_step_scale=" << detail::fmt_double(cfg.classic_scale()) << '\n';
  os << "classic_step_exponent=" << detail::fmt_double(cfg.classic_exponent()) << '\n';
  os << "classic_normalized=" << (cfg.classic_normalize() ? 1 : 0) << '\n';
  os << "completed_trials=" << res.curve.trials << "\naborted_trials=" << res.aborted << '\n';
  os << "certified=" << (res.curve.certified ? 1 : 0) << '\n';
  os << "rng=xoshiro256**/splitmix64\n";
  os << "library_version=" << kVersion << '\n';
}

/// Regenerates the instance for every trial, runs all solvers from the same
/// starting point and averages the gaps pointwise. Throws ExperimentError
/// when more than 5% of the trials abort.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  ExperimentResult res;
  res.trials.resize(static_cast<std::size_t>(cfg.trials));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < cfg.trials; t = next++) res.trials[t] = run_trial(cfg, t);
  };
  const int jobs = std::min(cfg.jobs, cfg.trials);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  for (const auto& tr : res.trials) {
    if (!tr.error) continue;
    ++res.aborted;
    if (log) *log << "trial " << tr.trial << " (seed " << tr.seed << ") aborted: " << *tr.error << '\n';
  }
  if (res.aborted * 20 > cfg.trials)
    throw ExperimentError(std::to_string(res.aborted) + " of " + std::to_string(cfg.trials) +
                          " trials aborted");

  const std::size_t len = static_cast<std::size_t>(cfg.max_iter) + 1;
  for (Method m : cfg.solvers) res.curve.mean_gap[std::string(method_name(m))].assign(len, 0.0);
  for (const auto& tr : res.trials) {
    if (tr.error) continue;
    ++res.curve.trials;
    res.curve.certified = res.curve.certified && tr.reference.certified;
    for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
      auto& acc = res.curve.mean_gap[std::string(method_name(cfg.solvers[s]))];
      for (std::size_t k = 0; k < len; ++k) acc[k] += *tr.traces[s].records[k].gap;
    }
  }
  for (auto& [name, curve] : res.curve.mean_gap)
    for (auto& v : curve) v /= res.curve.trials;

  if (!cfg.output.empty()) {
    const std::filesystem::path out(cfg.output);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream agg(out), raw(trials_path(out)), meta(meta_path(out));
    if (!agg || !raw || !meta) throw ExperimentError("cannot open output files at " + cfg.output);
    write_aggregate_csv(agg, cfg, res);
    write_trials_csv(raw, cfg, res);
    write_meta(meta, cfg, res);
  }
  return res;
}

}  // namespace l1sub

#endif  // L1SUB_BENCH_HPP
