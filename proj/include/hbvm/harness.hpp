#pragma once

// Refinement studies and energy-drift experiments.

#include <stdexcept>
#include <vector>

#include "hbvm/hamiltonians.hpp"
#include "hbvm/integrator.hpp"

namespace hbvm {

/// The requested horizon holds no complete coarse step.
class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ConvergenceReport {
  std::vector<double> stepsizes;  // h0, h0/2, ...
  std::vector<double> errors;     // errors[i]: level i vs level i+1
  std::vector<double> orders;     // log2(errors[i] / errors[i+1])
  double t_end = 0.0;             // horizon actually integrated
};

/// Integrates `system` from its initial state with h0, h0/2, ..., h0/2^levels
/// and reports `levels` error estimates, each the max-norm difference between
/// two consecutive refinements on their shared grid points.
///
/// The horizon is snapped down to a whole number of coarse steps; the
/// effective value is returned in the report. Throws GridError if
/// t_end < h0, std::invalid_argument if levels < 2, SolverError on solver
/// failure. Levels are integrated concurrently; the result does not depend
/// on scheduling.
[[nodiscard]] ConvergenceReport convergence_study(int k, int s, const CanonicalSystem& system,
                                                  double h0, int levels, double t_end,
                                                  const SolverOptions& opts = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs at least two
/// distinct x values; otherwise returns a zero fit. Throws
/// std::invalid_argument on length mismatch.
[[nodiscard]] LinearFit least_squares_line(const std::vector<double>& x,
                                           const std::vector<double>& y);

struct DriftResult {
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<double> energy_deviation;  // H(y_n) - H(y_0), signed
  double slope = 0.0;                    // fitted over steps >= kDriftTransientSteps
  double max_abs_error = 0.0;
};

inline constexpr long kDriftTransientSteps = 10;

[[nodiscard]] DriftResult drift_experiment(int k, int s, const CanonicalSystem& system, double h,
                                           long n_steps, const SolverOptions& opts = {});

}  // namespace hbvm
