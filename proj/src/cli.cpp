#include "hbvm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hbvm/hamiltonians.hpp"
#include "hbvm/harness.hpp"
#include "hbvm/integrator.hpp"
#include "hbvm/legendre.hpp"
#include "hbvm/tableau.hpp"

#ifndef HBVM_BUILD_DESCRIBE
#define HBVM_BUILD_DESCRIBE "unknown"
#endif

namespace hbvm::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct MethodArgs {
  int k = 2;
  int s = 2;
};

struct SolverArgs {
  std::string solver = "auto";
  double tol = 1e-13;
  int max_iter = 100;
  std::string out_path;
};

// FPU is stiff (omega = 50); plain fixed-point iteration diverges at the
// step sizes of interest, so "auto" picks the Newton-like solver there.
SolverOptions solver_options(const SolverArgs& args, const std::string& problem) {
  SolverOptions opts;
  opts.tolerance = args.tol;
  opts.max_iterations = args.max_iter;
  if (args.solver == "newton" || (args.solver == "auto" && problem == "fpu")) {
    opts.mode = SolverMode::newton_like;
  }
  opts.validate();
  return opts;
}

const char* solver_name(SolverMode mode) {
  return mode == SolverMode::newton_like ? "newton" : "fixed-point";
}

double default_horizon(const std::string& problem) {
  static const std::map<std::string, double> horizons{
      {"fhp", 20.0}, {"fpu", 1.0}, {"biot", 30.0}, {"harmonic", 2.0 * std::numbers::pi}};
  return horizons.at(problem);
}

State parse_state(const std::string& text, int dim) {
  State y(dim);
  std::stringstream ss(text);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= dim) {
      throw UsageError("--y0 has more than " + std::to_string(dim) + " components");
    }
    try {
      std::size_t used = 0;
      y(i) = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--y0: cannot parse '" + item + "'");
    }
    ++i;
  }
  if (i != dim) {
    throw UsageError("--y0 needs " + std::to_string(dim) + " comma-separated components");
  }
  return y;
}

void write_metadata(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [key, value] : kv) {
    os << "# " << key << '=' << value << '\n';
  }
  os << "# build=" << HBVM_BUILD_DESCRIBE << '\n';
}

std::string method_label(int k, int s) {
  return "HBVM(" + std::to_string(k) + "," + std::to_string(s) + ")";
}

std::string solver_label(const SolverOptions& opts) {
  return std::string(solver_name(opts.mode)) + " tol=" + num(opts.tolerance) +
         " max_iter=" + std::to_string(opts.max_iterations);
}

// Runs `body` against --out PATH if given, else the caller's stream.
template <class Body>
void with_output(const std::string& path, std::ostream& out, Body&& body) {
  if (path.empty()) {
    body(out);
    return;
  }
  std::ofstream file(path);
  if (!file) {
    throw UsageError("cannot open output file '" + path + "'");
  }
  body(file);
}

void validation_report(std::ostream& os, const ButcherTableau& tab, unsigned seed) {
  const auto rep = check_simplifying_conditions(tab);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_y(-2.0, 3.0);
  std::uniform_real_distribution<double> re(-10.0, -1e-2);
  std::uniform_real_distribution<double> im(-10.0, 10.0);
  double axis_dev = 0.0;
  double left_max = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double y = std::pow(10.0, log_y(rng));
    axis_dev = std::max(axis_dev, std::abs(std::abs(stability_function(tab, {0.0, y})) - 1.0));
    left_max = std::max(left_max, std::abs(stability_function(tab, {re(rng), im(rng)})));
  }
  os << "check,value\n";
  os << "B_order," << rep.B_order << '\n';
  os << "C_order," << rep.C_order << '\n';
  os << "D_order," << rep.D_order << '\n';
  os << "symmetry_residual," << num(check_symmetry(tab)) << '\n';
  os << "rank," << numerical_rank(tab.C) << '\n';
  os << "max_imag_axis_deviation," << num(axis_dev) << '\n';
  os << "max_left_half_plane_modulus," << num(left_max) << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hamiltonian boundary value methods HBVM(k,s)", "hbvm"};
  app.require_subcommand(1);

  const std::vector<std::string> problems = problem_names();
  const std::vector<std::string> solvers{"auto", "fixed-point", "newton"};

  MethodArgs method;
  SolverArgs solver;
  std::string problem = "fhp";
  std::string format = "csv";
  std::string y0_text;
  double h = 0.1;
  long steps = 100;
  double h0 = 0.32;
  int levels = 5;
  double t_end = -1.0;
  unsigned seed = 42;
  bool check = false;

  auto add_method = [&](CLI::App* sub) {
    // --h is the step size, so help is long-form only.
    sub->set_help_flag("--help", "print this help message and exit");
    sub->add_option("--k", method.k, "Lobatto points minus one")->check(CLI::Range(1, 64));
    sub->add_option("--s", method.s, "polynomial degree")->check(CLI::Range(1, 64));
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--problem", problem, "fhp | fpu | biot | harmonic")
        ->check(CLI::IsMember(problems));
    sub->add_option("--solver", solver.solver, "auto | fixed-point | newton")
        ->check(CLI::IsMember(solvers));
    sub->add_option("--tol", solver.tol, "solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", solver.max_iter, "solver iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--out", solver.out_path, "write CSV here instead of stdout");
  };

  auto* tableau_cmd = app.add_subcommand("tableau", "print the HBVM(k,s) Butcher tableau");
  add_method(tableau_cmd);
  tableau_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  tableau_cmd->add_option("--out", solver.out_path, "write here instead of stdout");
  tableau_cmd->add_flag("--check", check, "print structural and sampled stability checks instead");
  tableau_cmd->add_option("--seed", seed, "seed for sampled stability checks");

  auto* integrate_cmd = app.add_subcommand("integrate", "integrate and print the trajectory");
  add_method(integrate_cmd);
  add_solver(integrate_cmd);
  integrate_cmd->add_option("--h", h, "step size")->check(CLI::NonNegativeNumber);
  integrate_cmd->add_option("--steps", steps, "number of steps")->check(CLI::NonNegativeNumber);
  integrate_cmd->add_option("--y0", y0_text, "initial state, comma separated (q..., p...)");

  auto* converge_cmd = app.add_subcommand("converge", "step-halving convergence study");
  add_method(converge_cmd);
  add_solver(converge_cmd);
  converge_cmd->add_option("--h0", h0, "coarsest step size")->check(CLI::PositiveNumber);
  converge_cmd->add_option("--levels", levels, "number of error estimates")->check(CLI::Range(2, 20));
  converge_cmd->add_option("--t-end", t_end, "horizon (default depends on the problem)");

  auto* drift_cmd = app.add_subcommand("drift", "energy deviation series and fitted drift slope");
  add_method(drift_cmd);
  add_solver(drift_cmd);
  drift_cmd->add_option("--h", h, "step size")->check(CLI::PositiveNumber);
  drift_cmd->add_option("--steps", steps, "number of steps")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (method.s > method.k) {
      throw UsageError("--s must not exceed --k");
    }

    if (tableau_cmd->parsed()) {
      const auto tab = hbvm_tableau(method.k, method.s);
      with_output(solver.out_path, out, [&](std::ostream& os) {
        if (check) {
          validation_report(os, tab, seed);
        } else if (format == "json") {
          os << tableau_to_json(tab) << '\n';
        } else {
          os << tableau_to_csv(tab);
        }
      });
      return kExitOk;
    }

    const CanonicalSystem system = make_problem(problem);
    const SolverOptions opts = solver_options(solver, problem);
    const auto method_kv = std::pair{std::string("method"), method_label(method.k, method.s)};
    const auto problem_kv = std::pair{std::string("problem"), problem};
    const auto solver_kv = std::pair{std::string("solver"), solver_label(opts)};

    if (integrate_cmd->parsed()) {
      const State y0 = y0_text.empty() ? system.initial_state : parse_state(y0_text, system.dimension());
      const auto traj = integrate(hbvm_tableau(method.k, method.s), system, y0, h, steps, opts);
      with_output(solver.out_path, out, [&](std::ostream& os) {
        write_metadata(os, {method_kv, problem_kv, {"h", num(h)}, {"steps", std::to_string(steps)},
                            {"t_end", num(steps * h)}, solver_kv});
        os << "step,time";
        for (int i = 1; i <= system.dimension(); ++i) os << ",y_" << i;
        os << ",energy_error\n";
        for (std::size_t n = 0; n < traj.size(); ++n) {
          os << n << ',' << num(traj.times[n]);
          for (Eigen::Index i = 0; i < traj.states[n].size(); ++i) os << ',' << num(traj.states[n](i));
          os << ',' << num(traj.energy_error[n]) << '\n';
        }
      });
      return kExitOk;
    }

    if (converge_cmd->parsed()) {
      const double horizon = t_end > 0.0 ? t_end : default_horizon(problem);
      const auto rep = convergence_study(method.k, method.s, system, h0, levels, horizon, opts);
      with_output(solver.out_path, out, [&](std::ostream& os) {
        write_metadata(os, {method_kv, problem_kv, {"h0", num(h0)}, {"levels", std::to_string(levels)},
                            {"t_end_requested", num(horizon)}, {"t_end", num(rep.t_end)}, solver_kv});
        os << "h,error,order\n";
        for (std::size_t i = 0; i < rep.stepsizes.size(); ++i) {
          os << num(rep.stepsizes[i]) << ',' << num(rep.errors[i]) << ',';
          if (i > 0) os << num(rep.orders[i - 1]);
          os << '\n';
        }
      });
      return kExitOk;
    }

    if (drift_cmd->parsed()) {
      const auto res = drift_experiment(method.k, method.s, system, h, steps, opts);
      with_output(solver.out_path, out, [&](std::ostream& os) {
        write_metadata(os, {method_kv, problem_kv, {"h", num(h)}, {"steps", std::to_string(steps)},
                            {"t_end", num(steps * h)}, solver_kv, {"slope", num(res.slope)},
                            {"max_abs_energy_error", num(res.max_abs_error)}});
        os << "step,time,energy_error\n";
        for (std::size_t n = 0; n < res.steps.size(); ++n) {
          os << res.steps[n] << ',' << num(res.times[n]) << ',' << num(res.energy_deviation[n]) << '\n';
        }
      });
      return kExitOk;
    }
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const DomainError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const LobattoConvergenceError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace hbvm::cli
