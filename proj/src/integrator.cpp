#include "hbvm/integrator.hpp"

#include <cmath>
#include <optional>

#include "hbvm/legendre.hpp"

namespace hbvm {

void SolverOptions::validate() const {
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("SolverOptions: tolerance must be positive");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("SolverOptions: max_iterations must be >= 1");
  }
}

const char* to_string(StepStatus status) {
  switch (status) {
    case StepStatus::converged: return "converged";
    case StepStatus::max_iterations: return "max_iterations";
    case StepStatus::diverged: return "diverged";
  }
  return "unknown";
}

namespace {

void check_dimensions(const ButcherTableau& tab, const CanonicalSystem& system, const State& y0) {
  if (y0.size() != system.dimension()) {
    throw std::invalid_argument("state dimension " + std::to_string(y0.size()) +
                                " does not match system '" + system.name + "' (" +
                                std::to_string(system.dimension()) + ")");
  }
  if (tab.C.rows() != tab.stages() || tab.C.cols() != tab.stages() ||
      tab.weights.size() != tab.stages()) {
    throw std::invalid_argument("malformed tableau");
  }
}

// Column i of the result is f(Y_i).
Eigen::MatrixXd eval_stages(const CanonicalSystem& system, const Eigen::MatrixXd& stages) {
  Eigen::MatrixXd out(stages.rows(), stages.cols());
  for (Eigen::Index i = 0; i < stages.cols(); ++i) {
    out.col(i) = system.vector_field(stages.col(i));
  }
  return out;
}

// Newton matrix I - h (M kron Jf) acting on column-major vec of a 2m x n block.
Eigen::PartialPivLU<Eigen::MatrixXd> newton_factor(const Eigen::MatrixXd& coupling,
                                                   const Eigen::MatrixXd& jac, double h) {
  const Eigen::Index d = jac.rows();
  const Eigen::Index n = coupling.rows();
  Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(n * d, n * d);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      mat.block(j * d, l * d, d, d) -= h * coupling(j, l) * jac;
    }
  }
  return Eigen::PartialPivLU<Eigen::MatrixXd>(mat);
}

}  // namespace

Eigen::MatrixXd vector_field_jacobian(const CanonicalSystem& system, const State& y) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd jac(n, n);
  State probe = y;
  for (Eigen::Index b = 0; b < n; ++b) {
    const double eps = 1e-6 * (1.0 + std::abs(y(b)));
    probe(b) = y(b) + eps;
    const Eigen::VectorXd up = system.vector_field(probe);
    probe(b) = y(b) - eps;
    const Eigen::VectorXd down = system.vector_field(probe);
    probe(b) = y(b);
    jac.col(b) = (up - down) / (2.0 * eps);
  }
  return jac;
}

HbvmStepper::HbvmStepper(const ButcherTableau& tab) : tab_(tab) {
  const int n = tab.stages();
  const int s = tab.s;
  if (s < 1 || s > n - 1) {
    throw std::invalid_argument("HbvmStepper: tableau degree s out of range");
  }
  projector_.resize(s, n);
  integrals_.resize(n, s);
  for (int i = 0; i < n; ++i) {
    const double t = tab.nodes(i);
    const auto p = legendre_values(s - 1, t);
    for (int j = 0; j < s; ++j) {
      projector_(j, i) = (2.0 * j + 1.0) * tab.weights(i) * p[j];
      integrals_(i, j) = integrate_legendre(j, t);
    }
  }
  coupling_ = projector_ * integrals_;
}

StepResult HbvmStepper::step(const CanonicalSystem& system, const State& y0, double h,
                             const SolverOptions& opts) const {
  opts.validate();
  check_dimensions(tab_, system, y0);
  const Eigen::Index d = y0.size();
  const int s = tab_.s;
  const int n = tab_.stages();
  const double scale = 1.0 + y0.lpNorm<Eigen::Infinity>();

  StepResult res;
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(d, s);
  gamma.col(0) = system.vector_field(y0);

  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  if (opts.mode == SolverMode::newton_like) {
    lu = newton_factor(coupling_, vector_field_jacobian(system, y0), h);
  }

  res.status = StepStatus::max_iterations;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Eigen::MatrixXd stages =
        y0.replicate(1, n) + h * gamma * integrals_.transpose();
    const Eigen::MatrixXd mapped = eval_stages(system, stages) * projector_.transpose();

    Eigen::MatrixXd delta;
    if (lu) {
      const Eigen::MatrixXd residual = gamma - mapped;
      const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(residual.data(), residual.size());
      const Eigen::VectorXd sol = lu->solve(rhs);
      delta = Eigen::Map<const Eigen::MatrixXd>(sol.data(), d, s);
    } else {
      delta = mapped - gamma;
    }
    gamma += delta;
    res.iterations = it;
    res.increment = std::abs(h) * delta.lpNorm<Eigen::Infinity>() / scale;

    if (!std::isfinite(res.increment) || !gamma.allFinite()) {
      res.status = StepStatus::diverged;
      break;
    }
    if (res.increment <= opts.tolerance) {
      res.status = StepStatus::converged;
      break;
    }
  }

  res.coefficients.gamma = gamma;
  res.y1 = y0 + h * gamma * integrals_.row(n - 1).transpose();
  return res;
}

StepResult hbvm_step(const ButcherTableau& tab, const CanonicalSystem& system, const State& y0,
                     double h, const SolverOptions& opts) {
  return HbvmStepper(tab).step(system, y0, h, opts);
}

StepResult full_tableau_step(const ButcherTableau& tab, const CanonicalSystem& system,
                             const State& y0, double h, const SolverOptions& opts) {
  opts.validate();
  check_dimensions(tab, system, y0);
  const Eigen::Index d = y0.size();
  const Eigen::Index n = tab.stages();
  const double scale = 1.0 + y0.lpNorm<Eigen::Infinity>();

  StepResult res;
  Eigen::MatrixXd stages = y0.replicate(1, n);

  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  if (opts.mode == SolverMode::newton_like) {
    lu = newton_factor(tab.C, vector_field_jacobian(system, y0), h);
  }

  res.status = StepStatus::max_iterations;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Eigen::MatrixXd mapped =
        y0.replicate(1, n) + h * eval_stages(system, stages) * tab.C.transpose();
    Eigen::MatrixXd delta;
    if (lu) {
      const Eigen::MatrixXd residual = stages - mapped;
      const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(residual.data(), residual.size());
      const Eigen::VectorXd sol = lu->solve(rhs);
      delta = Eigen::Map<const Eigen::MatrixXd>(sol.data(), d, n);
    } else {
      delta = mapped - stages;
    }
    stages += delta;
    res.iterations = it;
    res.increment = delta.lpNorm<Eigen::Infinity>() / scale;

    if (!std::isfinite(res.increment) || !stages.allFinite()) {
      res.status = StepStatus::diverged;
      break;
    }
    if (res.increment <= opts.tolerance) {
      res.status = StepStatus::converged;
      break;
    }
  }

  if (res.status == StepStatus::diverged) {
    res.y1 = stages.col(n - 1);
  } else {
    res.y1 = y0 + h * eval_stages(system, stages) * tab.weights;
  }
  return res;
}

Trajectory integrate(const ButcherTableau& tab, const CanonicalSystem& system, const State& y0,
                     double h, long n_steps, const SolverOptions& opts) {
  if (n_steps < 0) {
    throw std::invalid_argument("integrate: n_steps must be >= 0");
  }
  const HbvmStepper stepper(tab);
  const double h0 = system.energy(y0);

  Trajectory traj;
  traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.energy_error.reserve(static_cast<std::size_t>(n_steps) + 1);
  traj.solver_iterations.reserve(static_cast<std::size_t>(n_steps) + 1);

  traj.times.push_back(0.0);
  traj.states.push_back(y0);
  traj.energy_error.push_back(0.0);
  traj.solver_iterations.push_back(0);

  State y = y0;
  for (long n = 0; n < n_steps; ++n) {
    auto res = stepper.step(system, y, h, opts);
    if (!res.converged()) {
      throw SolverError("step " + std::to_string(n) + " did not converge (" +
                            to_string(res.status) + ", increment " +
                            std::to_string(res.increment) + ")",
                        n, std::move(res));
    }
    y = res.y1;
    traj.times.push_back(static_cast<double>(n + 1) * h);
    traj.states.push_back(y);
    traj.energy_error.push_back(std::abs(system.energy(y) - h0));
    traj.solver_iterations.push_back(res.iterations);
  }
  return traj;
}

namespace {

State checked_step(const HbvmStepper& stepper, const CanonicalSystem& system, const State& y0,
                   double h, const SolverOptions& opts, long index) {
  auto res = stepper.step(system, y0, h, opts);
  if (!res.converged()) {
    throw SolverError(std::string("step did not converge (") + to_string(res.status) + ")", index,
                      std::move(res));
  }
  return res.y1;
}

}  // namespace

double adjoint_consistency_check(const ButcherTableau& tab, const CanonicalSystem& system,
                                 const State& y0, double h, const SolverOptions& opts) {
  const HbvmStepper stepper(tab);
  const State forward = checked_step(stepper, system, y0, h, opts, 0);
  const State back = checked_step(stepper, system, forward, -h, opts, 1);
  return (back - y0).lpNorm<Eigen::Infinity>();
}

double per_step_energy_error(const ButcherTableau& tab, const CanonicalSystem& system,
                             const State& y0, double h, const SolverOptions& opts) {
  const HbvmStepper stepper(tab);
  const State y1 = checked_step(stepper, system, y0, h, opts, 0);
  return std::abs(system.energy(y1) - system.energy(y0));
}

}  // namespace hbvm
