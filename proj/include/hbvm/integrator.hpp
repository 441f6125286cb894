#pragma once

// One-step HBVM(k,s) solver working on the s Legendre coefficients of the
// stage polynomial derivative, and a constant-step driver.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hbvm/hamiltonians.hpp"
#include "hbvm/tableau.hpp"

namespace hbvm {

enum class SolverMode { fixed_point, newton_like };

/// Convergence is declared when |h| * max|gamma_new - gamma_old| / (1 + |y0|_inf)
/// drops to `tolerance`, i.e. when the stage values stop moving.
struct SolverOptions {
  SolverMode mode = SolverMode::fixed_point;
  double tolerance = 1e-13;
  int max_iterations = 100;

  /// Throws std::invalid_argument if tolerance <= 0 or max_iterations < 1.
  void validate() const;
};

/// Column j holds gamma_j, the coefficient of P_j in sigma'(t) = sum_j gamma_j P_j(t).
struct StageCoefficients {
  Eigen::MatrixXd gamma;  // 2m x s
};

enum class StepStatus { converged, max_iterations, diverged };

[[nodiscard]] const char* to_string(StepStatus status);

struct StepResult {
  State y1;
  StageCoefficients coefficients;
  StepStatus status = StepStatus::converged;
  int iterations = 0;
  double increment = 0.0;  // last scaled increment

  [[nodiscard]] bool converged() const { return status == StepStatus::converged; }
};

/// Raised by drivers when a step fails to converge. The step is rejected;
/// `step_index` is the 0-based index of the step that was attempted.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long step_index, StepResult diagnostics)
      : std::runtime_error(what), step_index_(step_index), diagnostics_(std::move(diagnostics)) {}

  [[nodiscard]] long step_index() const { return step_index_; }
  [[nodiscard]] const StepResult& diagnostics() const { return diagnostics_; }

 private:
  long step_index_;
  StepResult diagnostics_;
};

/// Solves gamma_j = (2j+1) sum_i b_i P_j(t_i) f(Y_i), with stage values
/// Y_i = y0 + h sum_l gamma_l int_0^{t_i} P_l, and returns y1 = Y_k.
/// The nonlinear system has s * 2m unknowns regardless of k.
///
/// Immutable after construction; `step` may be called concurrently.
class HbvmStepper {
 public:
  explicit HbvmStepper(const ButcherTableau& tab);

  [[nodiscard]] StepResult step(const CanonicalSystem& system, const State& y0, double h,
                                const SolverOptions& opts) const;

  [[nodiscard]] const ButcherTableau& tableau() const { return tab_; }

 private:
  ButcherTableau tab_;
  Eigen::MatrixXd projector_;   // s x (k+1): (2j+1) b_i P_j(t_i)
  Eigen::MatrixXd integrals_;   // (k+1) x s: int_0^{t_i} P_l
  Eigen::MatrixXd coupling_;    // s x s: projector_ * integrals_
};

[[nodiscard]] StepResult hbvm_step(const ButcherTableau& tab, const CanonicalSystem& system,
                                   const State& y0, double h, const SolverOptions& opts = {});

/// Direct solve of the (k+1)-stage Runge-Kutta system Y = y0 + h (C (x) I) f(Y),
/// y1 = y0 + h sum_i b_i f(Y_i). Reference path for the coefficient-space solver.
[[nodiscard]] StepResult full_tableau_step(const ButcherTableau& tab, const CanonicalSystem& system,
                                           const State& y0, double h,
                                           const SolverOptions& opts = {});

/// Central-difference Jacobian of the vector field J grad H at y.
[[nodiscard]] Eigen::MatrixXd vector_field_jacobian(const CanonicalSystem& system, const State& y);

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> energy_error;  // |H(y_n) - H(y_0)|
  std::vector<int> solver_iterations;

  [[nodiscard]] std::size_t size() const { return times.size(); }
};

/// n_steps constant steps of size h; t_n = n h. Throws SolverError on the
/// first step that does not converge.
[[nodiscard]] Trajectory integrate(const ButcherTableau& tab, const CanonicalSystem& system,
                                   const State& y0, double h, long n_steps,
                                   const SolverOptions& opts = {});

/// max-norm of step(step(y0, h), -h) - y0.
[[nodiscard]] double adjoint_consistency_check(const ButcherTableau& tab,
                                               const CanonicalSystem& system, const State& y0,
                                               double h, const SolverOptions& opts = {});

/// |H(y1) - H(y0)| for a single step.
[[nodiscard]] double per_step_energy_error(const ButcherTableau& tab, const CanonicalSystem& system,
                                           const State& y0, double h,
                                           const SolverOptions& opts = {});

}  // namespace hbvm
