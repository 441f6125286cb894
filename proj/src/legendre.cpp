#include "hbvm/legendre.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hbvm {

namespace {

struct ValueAndSlope {
  double value;
  double slope;
};

ValueAndSlope legendre_with_deriv(int n, double x) {
  const double xi = 2.0 * x - 1.0;
  double p_prev = 0.0;  // P_{-1}
  double p = 1.0;       // P_0
  double d_prev = 0.0;
  double d = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p_next = ((2 * j + 1) * xi * p - j * p_prev) / (j + 1);
    const double d_next = ((2 * j + 1) * (2.0 * p + xi * d) - j * d_prev) / (j + 1);
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

}  // namespace

double eval_legendre(int n, double x) {
  if (n < 0) {
    throw std::invalid_argument("eval_legendre: negative degree");
  }
  const double xi = 2.0 * x - 1.0;
  double p_prev = 0.0;
  double p = 1.0;
  for (int j = 0; j < n; ++j) {
    const double p_next = ((2 * j + 1) * xi * p - j * p_prev) / (j + 1);
    p_prev = p;
    p = p_next;
  }
  return p;
}

double eval_legendre_deriv(int n, double x) {
  if (n < 0) {
    throw std::invalid_argument("eval_legendre_deriv: negative degree");
  }
  return legendre_with_deriv(n, x).slope;
}

double integrate_legendre(int n, double x) {
  if (n < 0) {
    throw std::invalid_argument("integrate_legendre: negative degree");
  }
  if (n == 0) {
    return x;
  }
  return (eval_legendre(n + 1, x) - eval_legendre(n - 1, x)) / (2.0 * (2 * n + 1));
}

std::vector<double> legendre_values(int nmax, double x) {
  if (nmax < 0) {
    return {};
  }
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
  const double xi = 2.0 * x - 1.0;
  out[0] = 1.0;
  if (nmax >= 1) {
    out[1] = xi;
  }
  for (int j = 1; j < nmax; ++j) {
    out[j + 1] = ((2 * j + 1) * xi * out[j] - j * out[j - 1]) / (j + 1);
  }
  return out;
}

LobattoRule lobatto_rule(int k) {
  if (k < 1) {
    throw std::invalid_argument("lobatto_rule: k must be >= 1");
  }
  constexpr double kTol = 1e-15;
  constexpr int kMaxIter = 100;

  LobattoRule rule;
  rule.nodes.assign(static_cast<std::size_t>(k) + 1, 0.0);
  rule.weights.assign(static_cast<std::size_t>(k) + 1, 0.0);
  rule.nodes[k] = 1.0;

  // Interior nodes: zeros of P_k'. The second derivative comes from the
  // shifted Legendre equation d/dx[(x^2-x) P'] = k(k+1) P.
  for (int i = 1; i < k; ++i) {
    double x = 0.5 * (1.0 - std::cos(std::numbers::pi * i / k));
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
      const auto [p, dp] = legendre_with_deriv(k, x);
      const double d2p = (k * (k + 1.0) * p - (2.0 * x - 1.0) * dp) / (x * x - x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) <= kTol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw LobattoConvergenceError("lobatto_rule: Newton iteration did not converge for k = " +
                                    std::to_string(k) + ", node " + std::to_string(i));
    }
    rule.nodes[i] = x;
  }

  for (int i = 0; i <= k; ++i) {
    const double p = eval_legendre(k, rule.nodes[i]);
    rule.weights[i] = 1.0 / (k * (k + 1.0) * p * p);
  }

  for (int i = 0; 2 * i < k; ++i) {
    const int j = k - i;
    const double t = 0.5 * (rule.nodes[i] + (1.0 - rule.nodes[j]));
    const double b = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = t;
    rule.nodes[j] = 1.0 - t;
    rule.weights[i] = b;
    rule.weights[j] = b;
  }
  if (k % 2 == 0) {
    rule.nodes[k / 2] = 0.5;
  }
  rule.nodes[0] = 0.0;
  rule.nodes[k] = 1.0;
  return rule;
}

}  // namespace hbvm
