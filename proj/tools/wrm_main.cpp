// Command-line front end: solve the built-in problems, cross-check analytic
// Jacobians against finite differences, run the Hadamard property suite, and
// sweep scheme comparisons. JSON goes to stdout, diagnostics to stderr.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "wrm/problems.hpp"
#include "wrm/properties.hpp"
#include "wrm/solvers.hpp"

using json = nlohmann::ordered_json;
using namespace wrm;

namespace {

// Exit discipline: 0 success, 1 failed check, 2 non-convergence, 3 bad config.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitBadConfig = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string problem;
  std::string scheme = "novel";
  std::size_t n = 8;
  std::string basis;  // empty = per-problem default
  std::string jacobian = "sjt";
  std::string method = "newton";
  double tol_residual = 1e-10;
  double tol_step = 1e-12;
  std::size_t max_iter = 50;
  double damping = 1.0;
  std::uint64_t seed = 1;
  std::size_t trials = 20;
  std::size_t cases = 200;
  std::string output = "json";
  std::string config_path;
  std::string n_list = "4,6,8";
  bool timing = false;
  // problem parameters
  double alpha = 1.0;
  double t0 = 0.0;
  double ql = 1.0;
  double length = 1.0;
  double load = 10.0;
  double stiffness = 0.05;
};

ProblemName parse_problem(const std::string& s) {
  if (s == "exp-ode") return ProblemName::ExpOde;
  if (s == "sin-ode") return ProblemName::SinOde;
  if (s == "heat-slab") return ProblemName::HeatSlab;
  if (s == "beam") return ProblemName::Beam;
  throw ConfigError("problem: unknown name '" + s + "'");
}

BasisKind parse_basis(const std::string& s) {
  if (s == "sine") return BasisKind::Sine;
  if (s == "legendre") return BasisKind::Legendre;
  if (s == "monomial") return BasisKind::Monomial;
  throw ConfigError("basis: unknown kind '" + s + "'");
}

BasisKind default_basis(ProblemName name, const std::string& requested) {
  if (!requested.empty()) return parse_basis(requested);
  // The exp-ode discrete system has no reachable root on the hierarchic
  // polynomial family; the half-wave sines behave well there.
  return name == ProblemName::ExpOde ? BasisKind::Sine : BasisKind::Legendre;
}

void validate_common(const CliConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("n: must be at least 2");
  if (cfg.tol_residual <= 0.0) throw ConfigError("tol-residual: must be positive");
  if (cfg.tol_step <= 0.0) throw ConfigError("tol-step: must be positive");
  if (cfg.max_iter < 1) throw ConfigError("max-iter: must be at least 1");
  if (!(cfg.damping > 0.0 && cfg.damping <= 1.0)) throw ConfigError("damping: must be in (0, 1]");
  if (cfg.scheme != "novel" && cfg.scheme != "traditional") {
    throw ConfigError("scheme: unknown value '" + cfg.scheme + "'");
  }
  if (cfg.jacobian != "sjt" && cfg.jacobian != "fd") {
    throw ConfigError("jacobian: unknown value '" + cfg.jacobian + "'");
  }
  if (cfg.method != "newton" && cfg.method != "picard") {
    throw ConfigError("method: unknown value '" + cfg.method + "'");
  }
  if (cfg.output != "json" && cfg.output != "csv" && cfg.output != "table") {
    throw ConfigError("output: unknown value '" + cfg.output + "'");
  }
}

SolveOptions solve_options(const CliConfig& cfg) {
  SolveOptions opts;
  opts.method = cfg.method == "picard" ? SolveMethod::Picard : SolveMethod::Newton;
  opts.jacobian_mode =
      cfg.jacobian == "fd" ? JacobianMode::FiniteDifference : JacobianMode::Analytic;
  opts.tol_residual = cfg.tol_residual;
  opts.tol_step = cfg.tol_step;
  opts.max_iter = cfg.max_iter;
  opts.damping = cfg.damping;
  return opts;
}

struct SolveOutcome {
  bool converged = false;
  std::size_t iterations = 0;
  std::vector<double> residual_history;
  std::vector<std::pair<double, double>> samples;  // (x, value)
  bool has_exact = false;
  double exact_error_max = 0.0;
  std::size_t flops_analytic = 0;
  std::size_t flops_fd = 0;
  double final_residual_norm = 0.0;
  double wall_seconds = 0.0;
};

void fill_samples(SolveOutcome& out, const BasisSet& basis, const RealVector& coeffs,
                  const ExactSolution& exact) {
  for (int i = 0; i <= 10; ++i) {
    double x = basis.x_lo() + (basis.x_hi() - basis.x_lo()) * i / 10.0;
    double v = expansion_value(basis, coeffs, x);
    out.samples.emplace_back(x, v);
    if (exact.present) {
      out.has_exact = true;
      out.exact_error_max = std::max(out.exact_error_max, std::abs(v - exact.value(x)));
    }
  }
}

// One-sided finite-difference multiplication count for a residual whose single
// instrumented evaluation is performed by eval_once: dim + 1 evaluations plus
// one scaling per Jacobian entry.
std::size_t fd_cost_generic(std::size_t dim, const std::function<void(JacobianStats&)>& eval_once) {
  JacobianStats stats;
  for (std::size_t j = 0; j <= dim; ++j) eval_once(stats);
  stats.multiplications += dim * dim;
  return stats.multiplications;
}

SolveOutcome run_solve(const CliConfig& cfg) {
  ProblemName name = parse_problem(cfg.problem);
  BasisKind kind = default_basis(name, cfg.basis);
  SolveOptions opts = solve_options(cfg);
  if (cfg.scheme == "traditional" && name != ProblemName::HeatSlab) {
    throw ConfigError("scheme: traditional is only available for heat-slab");
  }
  if (name == ProblemName::Beam && cfg.method == "picard") {
    throw ConfigError("method: picard is not available for beam");
  }
  HeatParams hp{cfg.alpha, cfg.t0, cfg.ql, cfg.length};
  BeamParams bp{cfg.load, cfg.stiffness};
  SolveOutcome out;

  if (name == ProblemName::Beam) {
    CoupledSystem cs = build_beam(bp, cfg.n, kind);
    CoupledSolve solved = solve_uncoupled(cs, RealVector(cfg.n), opts);
    out.converged = solved.report.converged;
    out.iterations = solved.report.iterations;
    out.residual_history = solved.report.residual_norm_history;
    out.final_residual_norm = max_norm(reduced_residual(cs, solved.w));
    out.wall_seconds = solved.report.wall_seconds;
    fill_samples(out, cs.w_basis, solved.w, ExactSolution{});
    JacobianStats analytic;
    reduced_jacobian(cs, solved.w, &analytic);
    out.flops_analytic = analytic.multiplications;
    out.flops_fd =
        fd_cost_generic(cfg.n, [&](JacobianStats& s) { reduced_residual(cs, solved.w, &s); });
    return out;
  }

  if (name == ProblemName::HeatSlab && cfg.scheme == "traditional") {
    if (cfg.method == "picard") {
      throw ConfigError("method: picard is not available for the traditional scheme");
    }
    TraditionalProblem prob = build_heat_slab_traditional(hp, cfg.n, kind);
    NonlinearFunction fn;
    fn.dim = cfg.n;
    fn.residual = [&prob](const RealVector& x) { return eval_traditional(prob.form, x); };
    if (opts.jacobian_mode == JacobianMode::Analytic) {
      fn.jacobian = [&prob](const RealVector& x, JacobianStats* stats) {
        return jacobian_traditional(prob.form, x, stats);
      };
    }
    SolveReport report = newton_solve(fn, RealVector(cfg.n), opts);
    out.converged = report.converged;
    out.iterations = report.iterations;
    out.residual_history = report.residual_norm_history;
    out.final_residual_norm = max_norm(eval_traditional(prob.form, report.solution));
    out.wall_seconds = report.wall_seconds;
    fill_samples(out, prob.basis, report.solution, prob.exact);
    JacobianStats analytic;
    jacobian_traditional(prob.form, report.solution, &analytic);
    out.flops_analytic = analytic.multiplications;
    out.flops_fd = fd_cost_generic(
        cfg.n, [&](JacobianStats& s) { eval_traditional(prob.form, report.solution, &s); });
    return out;
  }

  BuiltProblem prob = name == ProblemName::ExpOde   ? build_exp_ode(cfg.n, kind)
                      : name == ProblemName::SinOde ? build_sin_ode(cfg.n, kind)
                                                    : build_heat_slab_novel(hp, cfg.n, kind);
  SolveReport report = cfg.method == "picard" ? picard(prob.system, RealVector(cfg.n), opts)
                                              : newton(prob.system, RealVector(cfg.n), opts);
  out.converged = report.converged;
  out.iterations = report.iterations;
  out.residual_history = report.residual_norm_history;
  out.final_residual_norm =
      max_norm(eval_node(prob.system.residual(), report.solution) - prob.system.rhs());
  out.wall_seconds = report.wall_seconds;
  fill_samples(out, prob.basis, report.solution, prob.exact);
  out.flops_analytic =
      jacobian_with_stats(prob.system.residual(), report.solution).second.multiplications;
  out.flops_fd =
      fd_jacobian_cost(prob.system.residual(), report.solution, FdScheme::OneSided).multiplications;
  return out;
}

json solve_record(const CliConfig& cfg, const SolveOutcome& out) {
  json samples = json::array();
  for (const auto& [x, v] : out.samples) samples.push_back(json{{"x", x}, {"value", v}});
  json rec;
  rec["problem"] = cfg.problem;
  rec["scheme"] = cfg.scheme;
  rec["n"] = cfg.n;
  rec["converged"] = out.converged;
  rec["iterations"] = out.iterations;
  rec["residual_history"] = out.residual_history;
  rec["solution_samples"] = samples;
  rec["exact_error_max"] = out.has_exact ? json(out.exact_error_max) : json(nullptr);
  rec["jacobian_mode"] = cfg.jacobian;
  rec["flops"] = json{{"analytic", out.flops_analytic}, {"finite_difference", out.flops_fd}};
  rec["wall_seconds"] = cfg.timing ? out.wall_seconds : 0.0;
  return rec;
}

int cmd_solve(const CliConfig& cfg) {
  if (cfg.problem.empty()) throw ConfigError("problem: missing name");
  validate_common(cfg);
  SolveOutcome out = run_solve(cfg);
  if (cfg.output == "json") {
    std::cout << solve_record(cfg, out).dump(2) << "\n";
  } else if (cfg.output == "csv") {
    std::cout << "problem,scheme,n,converged,iterations,res_norm,err_max,jacobian_mode,"
                 "flops_analytic,flops_fd,seconds\n";
    std::ostringstream row;
    row << cfg.problem << "," << cfg.scheme << "," << cfg.n << "," << (out.converged ? 1 : 0)
        << "," << out.iterations << "," << std::scientific << out.final_residual_norm << ",";
    if (out.has_exact) row << out.exact_error_max;
    row << "," << cfg.jacobian << "," << out.flops_analytic << "," << out.flops_fd << ","
        << std::defaultfloat << (cfg.timing ? out.wall_seconds : 0.0);
    std::cout << row.str() << "\n";
  } else {
    std::ostringstream os;
    os << "problem        " << cfg.problem << " (" << cfg.scheme << ", n = " << cfg.n << ")\n"
       << "converged      " << (out.converged ? "yes" : "no") << " in " << out.iterations
       << " iterations\n"
       << "residual       " << std::scientific << out.final_residual_norm << "\n";
    if (out.has_exact) os << "max error      " << out.exact_error_max << "\n";
    os << "flops          analytic " << out.flops_analytic << ", finite-difference " << out.flops_fd
       << "\n"
       << "samples (x, value):\n";
    for (const auto& [x, v] : out.samples) os << "  " << x << "  " << v << "\n";
    std::cout << os.str();
  }
  return out.converged ? kExitOk : kExitNotConverged;
}

// ---- jacobian-check ---------------------------------------------------------------

int cmd_jacobian_check(const CliConfig& cfg) {
  if (cfg.problem.empty()) throw ConfigError("problem: missing name");
  validate_common(cfg);
  if (cfg.trials < 1) throw ConfigError("trials: must be positive");
  ProblemName name = parse_problem(cfg.problem);
  BasisKind kind = default_basis(name, cfg.basis);
  HeatParams hp{cfg.alpha, cfg.t0, cfg.ql, cfg.length};
  BeamParams bp{cfg.load, cfg.stiffness};

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto random_point = [&](std::size_t dim) {
    std::vector<double> v(dim);
    for (double& x : v) x = dist(rng);
    return RealVector(std::move(v));
  };
  auto rel_err = [](const RealMatrix& a, const RealMatrix& f) {
    return max_norm(a - f) / std::max({max_norm(a), max_norm(f), 1e-14});
  };

  double max_rel = 0.0;
  std::size_t flops_analytic = 0, flops_fd = 0;

  if (name == ProblemName::Beam) {
    CoupledSystem cs = build_beam(bp, cfg.n, kind);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      RealVector w = random_point(cfg.n);
      JacobianStats stats;
      RealMatrix ja = reduced_jacobian(cs, w, &stats);
      RealMatrix jf =
          fd_jacobian_fn([&cs](const RealVector& p) { return reduced_residual(cs, p); }, w);
      max_rel = std::max(max_rel, rel_err(ja, jf));
      flops_analytic = stats.multiplications;
      flops_fd = fd_cost_generic(cfg.n, [&](JacobianStats& s) { reduced_residual(cs, w, &s); });
    }
  } else if (name == ProblemName::HeatSlab && cfg.scheme == "traditional") {
    TraditionalProblem prob = build_heat_slab_traditional(hp, cfg.n, kind);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      RealVector x = random_point(cfg.n);
      JacobianStats stats;
      RealMatrix ja = jacobian_traditional(prob.form, x, &stats);
      RealMatrix jf = fd_jacobian_fn(
          [&prob](const RealVector& p) { return eval_traditional(prob.form, p); }, x);
      max_rel = std::max(max_rel, rel_err(ja, jf));
      flops_analytic = stats.multiplications;
      flops_fd =
          fd_cost_generic(cfg.n, [&](JacobianStats& s) { eval_traditional(prob.form, x, &s); });
    }
  } else {
    if (cfg.scheme == "traditional") {
      throw ConfigError("scheme: traditional is only available for heat-slab");
    }
    BuiltProblem prob = name == ProblemName::ExpOde   ? build_exp_ode(cfg.n, kind)
                        : name == ProblemName::SinOde ? build_sin_ode(cfg.n, kind)
                                                      : build_heat_slab_novel(hp, cfg.n, kind);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      RealVector x = random_point(cfg.n);
      auto [ja, stats] = jacobian_with_stats(prob.system.residual(), x);
      RealMatrix jf = fd_jacobian(prob.system.residual(), x);
      max_rel = std::max(max_rel, rel_err(ja, jf));
      flops_analytic = stats.multiplications;
      flops_fd = fd_jacobian_cost(prob.system.residual(), x, FdScheme::OneSided).multiplications;
    }
  }

  bool passed = max_rel <= 1e-5;
  if (cfg.output == "json") {
    json rec;
    rec["problem"] = cfg.problem;
    rec["scheme"] = cfg.scheme;
    rec["n"] = cfg.n;
    rec["trials"] = cfg.trials;
    rec["seed"] = cfg.seed;
    rec["max_relative_error"] = max_rel;
    rec["flops"] = json{{"analytic", flops_analytic}, {"finite_difference", flops_fd}};
    rec["passed"] = passed;
    std::cout << rec.dump(2) << "\n";
  } else {
    std::ostringstream os;
    os.precision(17);
    os << "jacobian-check " << cfg.problem << " (" << cfg.scheme << ", n = " << cfg.n << ", "
       << cfg.trials << " trials, seed " << cfg.seed << ")\n"
       << "max relative error: " << max_rel << "\n"
       << "flops: analytic " << flops_analytic << ", finite-difference " << flops_fd << "\n"
       << (passed ? "PASS" : "FAIL") << "\n";
    std::cout << os.str();
  }
  return passed ? kExitOk : kExitCheckFailed;
}

// ---- properties ----------------------------------------------------------------------

int cmd_properties(const CliConfig& cfg) {
  validate_common(cfg);
  if (cfg.cases < 1) throw ConfigError("cases: must be positive");
  PropertySuiteReport report = run_hadamard_property_suite(cfg.cases, cfg.seed);
  if (cfg.output == "json") {
    json rec;
    rec["cases"] = cfg.cases;
    rec["seed"] = cfg.seed;
    json checks = json::array();
    for (const auto& c : report.checks) {
      checks.push_back(
          json{{"name", c.name}, {"passed", c.passed}, {"worst", c.worst}, {"cases", c.cases}});
    }
    rec["checks"] = checks;
    rec["all_passed"] = report.all_passed();
    std::cout << rec.dump(2) << "\n";
  } else {
    std::ostringstream os;
    os.precision(17);
    os << "hadamard property suite (" << cfg.cases << " cases, seed " << cfg.seed << ")\n";
    for (const auto& c : report.checks) {
      os << "  " << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  worst " << c.worst
         << "  (" << c.cases << " cases)\n";
    }
    os << (report.all_passed() ? "all passed" : "FAILURES present") << "\n";
    std::cout << os.str();
  }
  return report.all_passed() ? kExitOk : kExitCheckFailed;
}

// ---- compare -------------------------------------------------------------------------

std::vector<std::size_t> parse_n_list(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int v = 0;
    try {
      v = std::stoi(item);
    } catch (const std::exception&) {
      throw ConfigError("n-list: bad entry '" + item + "'");
    }
    if (v < 2) throw ConfigError("n-list: entries must be at least 2");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("n-list: empty");
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_compare(const CliConfig& cfg) {
  validate_common(cfg);
  std::vector<std::size_t> sizes = parse_n_list(cfg.n_list);
  std::vector<std::string> problems = {"exp-ode", "heat-slab", "sin-ode"};
  if (!cfg.problem.empty()) {
    parse_problem(cfg.problem);
    if (cfg.problem == "beam") throw ConfigError("problem: compare does not cover beam");
    problems = {cfg.problem};
  }

  // Rows come out ordered by (problem, scheme, n) by construction.
  std::cout << "problem,scheme,n,iters,res_norm,err_max,seconds\n";
  for (const std::string& problem : problems) {
    std::vector<std::string> schemes = problem == "heat-slab"
                                           ? std::vector<std::string>{"novel", "traditional"}
                                           : std::vector<std::string>{"novel"};
    for (const std::string& scheme : schemes) {
      for (std::size_t n : sizes) {
        CliConfig run = cfg;
        run.problem = problem;
        run.scheme = scheme;
        run.n = n;
        SolveOutcome out = run_solve(run);
        std::ostringstream row;
        row << problem << "," << scheme << "," << n << "," << out.iterations << ","
            << std::scientific << out.final_residual_norm << ",";
        if (out.has_exact) row << out.exact_error_max;
        row << "," << std::defaultfloat << out.wall_seconds;
        std::cout << row.str() << "\n";
      }
    }
  }
  return kExitOk;
}

// ---- list ----------------------------------------------------------------------------

int cmd_list() {
  std::cout << "problems:\n"
            << "  exp-ode    schemes: novel              methods: newton, picard  exact: yes\n"
            << "  sin-ode    schemes: novel              methods: newton, picard  exact: no\n"
            << "  heat-slab  schemes: novel, traditional methods: newton, picard  exact: yes\n"
            << "  beam       schemes: novel              methods: newton          exact: no\n"
            << "bases: sine, legendre, monomial\n"
            << "jacobians: sjt, fd\n";
  return kExitOk;
}

// ---- config file -----------------------------------------------------------------------

void apply_config_file(CliConfig& cfg, const CLI::App& cmd) {
  if (cfg.config_path.empty()) return;
  std::ifstream in(cfg.config_path);
  if (!in) throw ConfigError("config: cannot open '" + cfg.config_path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("config: invalid JSON in '" + cfg.config_path + "': " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  auto flag_given = [&cmd](const std::string& flag) {
    const CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() > 0;
  };
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "problem") {
        if (cfg.problem.empty()) cfg.problem = value.get<std::string>();
      } else if (key == "scheme") {
        if (!flag_given(key)) cfg.scheme = value.get<std::string>();
      } else if (key == "n") {
        if (!flag_given(key)) cfg.n = value.get<std::size_t>();
      } else if (key == "basis") {
        if (!flag_given(key)) cfg.basis = value.get<std::string>();
      } else if (key == "jacobian") {
        if (!flag_given(key)) cfg.jacobian = value.get<std::string>();
      } else if (key == "method") {
        if (!flag_given(key)) cfg.method = value.get<std::string>();
      } else if (key == "tol-residual") {
        if (!flag_given(key)) cfg.tol_residual = value.get<double>();
      } else if (key == "tol-step") {
        if (!flag_given(key)) cfg.tol_step = value.get<double>();
      } else if (key == "max-iter") {
        if (!flag_given(key)) cfg.max_iter = value.get<std::size_t>();
      } else if (key == "damping") {
        if (!flag_given(key)) cfg.damping = value.get<double>();
      } else if (key == "seed") {
        if (!flag_given(key)) cfg.seed = value.get<std::uint64_t>();
      } else if (key == "trials") {
        if (!flag_given(key)) cfg.trials = value.get<std::size_t>();
      } else if (key == "cases") {
        if (!flag_given(key)) cfg.cases = value.get<std::size_t>();
      } else if (key == "output") {
        if (!flag_given(key)) cfg.output = value.get<std::string>();
      } else if (key == "n-list") {
        if (!flag_given(key)) cfg.n_list = value.get<std::string>();
      } else if (key == "timing") {
        if (!flag_given(key)) cfg.timing = value.get<bool>();
      } else if (key == "alpha") {
        if (!flag_given(key)) cfg.alpha = value.get<double>();
      } else if (key == "t0") {
        if (!flag_given(key)) cfg.t0 = value.get<double>();
      } else if (key == "ql") {
        if (!flag_given(key)) cfg.ql = value.get<double>();
      } else if (key == "length") {
        if (!flag_given(key)) cfg.length = value.get<double>();
      } else if (key == "load") {
        if (!flag_given(key)) cfg.load = value.get<double>();
      } else if (key == "stiffness") {
        if (!flag_given(key)) cfg.stiffness = value.get<double>();
      } else {
        throw ConfigError("config: unknown key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw ConfigError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

void add_common_options(CLI::App* cmd, CliConfig& cfg, bool with_problem) {
  if (with_problem) {
    cmd->add_option("problem", cfg.problem, "Problem name");
    cmd->add_option("--problem", cfg.problem, "Problem name");
  }
  cmd->add_option("--scheme", cfg.scheme, "Discretization scheme (novel|traditional)");
  cmd->add_option("--n", cfg.n, "Number of basis functions");
  cmd->add_option("--basis", cfg.basis, "Basis kind (sine|legendre|monomial)");
  cmd->add_option("--jacobian", cfg.jacobian, "Jacobian mode (sjt|fd)");
  cmd->add_option("--method", cfg.method, "Iteration method (newton|picard)");
  cmd->add_option("--tol-residual", cfg.tol_residual, "Residual max-norm tolerance");
  cmd->add_option("--tol-step", cfg.tol_step, "Step max-norm tolerance");
  cmd->add_option("--max-iter", cfg.max_iter, "Iteration cap");
  cmd->add_option("--damping", cfg.damping, "Newton step damping in (0, 1]");
  cmd->add_option("--seed", cfg.seed, "Seed for randomized suites");
  cmd->add_option("--trials", cfg.trials, "Random points for jacobian-check");
  cmd->add_option("--cases", cfg.cases, "Random cases for properties");
  cmd->add_option("--output", cfg.output, "Output format (json|csv|table)");
  cmd->add_option("--config", cfg.config_path, "JSON config file (flags win)");
  cmd->add_option("--n-list", cfg.n_list, "Comma-separated sizes for compare");
  cmd->add_flag("--timing", cfg.timing, "Report measured wall time (not byte-stable)");
  cmd->add_option("--alpha", cfg.alpha, "heat-slab: conductivity slope");
  cmd->add_option("--t0", cfg.t0, "heat-slab: left-end value");
  cmd->add_option("--ql", cfg.ql, "heat-slab: right-end flux");
  cmd->add_option("--length", cfg.length, "heat-slab: slab length");
  cmd->add_option("--load", cfg.load, "beam: load group");
  cmd->add_option("--stiffness", cfg.stiffness, "beam: stiffness group");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear weighted-residual toolkit"};
  app.require_subcommand(1);
  CliConfig cfg;

  CLI::App* solve = app.add_subcommand("solve", "Discretize and solve a problem");
  add_common_options(solve, cfg, true);
  CLI::App* jac =
      app.add_subcommand("jacobian-check", "Analytic vs finite-difference Jacobian comparison");
  add_common_options(jac, cfg, true);
  CLI::App* props = app.add_subcommand("properties", "Hadamard algebra property suite");
  add_common_options(props, cfg, false);
  CLI::App* compare = app.add_subcommand("compare", "Scheme comparison sweep (CSV)");
  add_common_options(compare, cfg, true);
  app.add_subcommand("list", "List problems, schemes and bases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    CLI::App* active = app.get_subcommands().front();
    apply_config_file(cfg, *active);
    if (app.got_subcommand(solve)) return cmd_solve(cfg);
    if (app.got_subcommand(jac)) return cmd_jacobian_check(cfg);
    if (app.got_subcommand(props)) return cmd_properties(cfg);
    if (app.got_subcommand(compare)) return cmd_compare(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const SingularError& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotConverged;
  }
  return kExitBadConfig;
}
