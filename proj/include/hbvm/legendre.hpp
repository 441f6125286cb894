#pragma once

// Shifted Legendre polynomials on [0,1] and Gauss-Lobatto quadrature.

#include <stdexcept>
#include <vector>

namespace hbvm {

/// P_n(x) on [0,1] by the three-term recurrence
/// (n+1) P_{n+1} = (2n+1)(2x-1) P_n - n P_{n-1}.
[[nodiscard]] double eval_legendre(int n, double x);

/// P_n'(x), from the differentiated three-term recurrence.
[[nodiscard]] double eval_legendre_deriv(int n, double x);

/// Integral of P_n over [0, x]. For n >= 1 and x == 1 the result is exactly 0.
[[nodiscard]] double integrate_legendre(int n, double x);

/// Values P_0(x) .. P_{nmax}(x) in one recurrence sweep.
[[nodiscard]] std::vector<double> legendre_values(int nmax, double x);

class LobattoConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (k+1)-point Gauss-Lobatto rule on [0,1]. Exact for polynomials of degree
/// up to 2k-1; nodes include both end-points.
struct LobattoRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int npoints() const { return static_cast<int>(nodes.size()); }
  [[nodiscard]] int degree_k() const { return npoints() - 1; }
};

/// Builds the (k+1)-point rule. Interior nodes are the zeros of P_k',
/// found by Newton's method from Chebyshev-Gauss-Lobatto starting points;
/// weights are 1 / (k (k+1) P_k(t_i)^2). The result is symmetrized so that
/// t_i + t_{k-i} = 1 and b_i = b_{k-i}.
///
/// Throws std::invalid_argument for k < 1 and LobattoConvergenceError if a
/// Newton iteration fails to converge.
[[nodiscard]] LobattoRule lobatto_rule(int k);

}  // namespace hbvm
