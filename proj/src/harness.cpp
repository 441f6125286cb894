#include "hbvm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

namespace hbvm {

ConvergenceReport convergence_study(int k, int s, const CanonicalSystem& system, double h0,
                                    int levels, double t_end, const SolverOptions& opts) {
  if (levels < 2) {
    throw std::invalid_argument("convergence_study: levels must be >= 2");
  }
  if (!(h0 > 0.0)) {
    throw std::invalid_argument("convergence_study: h0 must be positive");
  }
  const auto coarse_steps = static_cast<long>(std::floor(t_end / h0 + 1e-9));
  if (coarse_steps < 1) {
    throw GridError("convergence_study: horizon " + std::to_string(t_end) +
                    " is shorter than the coarse step " + std::to_string(h0));
  }

  const ButcherTableau tab = hbvm_tableau(k, s);
  std::vector<std::future<Trajectory>> runs;
  runs.reserve(static_cast<std::size_t>(levels) + 1);
  for (int i = 0; i <= levels; ++i) {
    const double h = std::ldexp(h0, -i);
    const long n = coarse_steps << i;
    runs.push_back(std::async(std::launch::async, [&tab, &system, &opts, h, n] {
      return integrate(tab, system, system.initial_state, h, n, opts);
    }));
  }
  std::vector<Trajectory> trajectories;
  trajectories.reserve(runs.size());
  for (auto& run : runs) {
    trajectories.push_back(run.get());
  }

  ConvergenceReport rep;
  rep.t_end = static_cast<double>(coarse_steps) * h0;
  for (int i = 0; i < levels; ++i) {
    const auto& coarse = trajectories[i].states;
    const auto& fine = trajectories[i + 1].states;
    double err = 0.0;
    for (std::size_t n = 0; n < coarse.size(); ++n) {
      err = std::max(err, (coarse[n] - fine[2 * n]).lpNorm<Eigen::Infinity>());
    }
    rep.stepsizes.push_back(std::ldexp(h0, -i));
    rep.errors.push_back(err);
  }
  for (int i = 0; i + 1 < levels; ++i) {
    rep.orders.push_back(std::log2(rep.errors[i] / rep.errors[i + 1]));
  }
  return rep;
}

LinearFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("least_squares_line: x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    return {};
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) {
    return {};
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

DriftResult drift_experiment(int k, int s, const CanonicalSystem& system, double h, long n_steps,
                             const SolverOptions& opts) {
  const Trajectory traj = integrate(hbvm_tableau(k, s), system, system.initial_state, h, n_steps, opts);
  const double h0 = system.energy(traj.states.front());

  DriftResult out;
  out.steps.resize(traj.size());
  out.times = traj.times;
  out.energy_deviation.resize(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out.steps[n] = static_cast<long>(n);
    out.energy_deviation[n] = system.energy(traj.states[n]) - h0;
    out.max_abs_error = std::max(out.max_abs_error, std::abs(out.energy_deviation[n]));
  }
  if (traj.size() > static_cast<std::size_t>(kDriftTransientSteps)) {
    const std::vector<double> t(out.times.begin() + kDriftTransientSteps, out.times.end());
    const std::vector<double> e(out.energy_deviation.begin() + kDriftTransientSteps,
                                out.energy_deviation.end());
    out.slope = least_squares_line(t, e).slope;
  }
  return out;
}

}  // namespace hbvm
