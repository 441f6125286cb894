#include <cmath>
#include <vector>

#include "doctest.h"
#include "hbvm/legendre.hpp"

using hbvm::eval_legendre;
using hbvm::eval_legendre_deriv;
using hbvm::integrate_legendre;
using hbvm::lobatto_rule;

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

// Explicit sum P_n(x) = (-1)^n sum_i C(n,i) C(n+i,i) (-x)^i.
double legendre_explicit(int n, double x) {
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    acc += binomial(n, i) * binomial(n + i, i) * std::pow(-x, i);
  }
  return (n % 2 == 0 ? 1.0 : -1.0) * acc;
}

}  // namespace

TEST_CASE("eval_legendre matches closed forms") {
  CHECK(eval_legendre(2, 0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(eval_legendre(3, 0.25) == doctest::Approx(20 * 0.015625 - 30 * 0.0625 + 3 - 1));

  for (int n = 0; n <= 10; ++n) {
    CHECK(eval_legendre(n, 1.0) == 1.0);
    CHECK(eval_legendre(n, 0.0) == (n % 2 == 0 ? 1.0 : -1.0));
  }
  CHECK(std::abs(eval_legendre(5, 0.3) - legendre_explicit(5, 0.3)) < 1e-14);
  for (int n = 0; n <= 10; ++n) {
    for (double x : {0.05, 0.37, 0.81}) {
      // The alternating explicit sum loses ~5 digits to cancellation at n = 10.
      CHECK(std::abs(eval_legendre(n, x) - legendre_explicit(n, x)) < 1e-9);
    }
  }
  CHECK_THROWS_AS((void)eval_legendre(-1, 0.5), std::invalid_argument);
}

TEST_CASE("eval_legendre_deriv") {
  for (double x : {0.0, 0.2, 0.9, 1.0}) {
    CHECK(eval_legendre_deriv(1, x) == 2.0);
  }
  CHECK(std::abs(eval_legendre_deriv(2, 0.5)) < 1e-15);

  const double eps = 1e-6;
  for (int n = 0; n <= 8; ++n) {
    for (int i = 1; i <= 9; ++i) {
      const double x = 0.1 * i;
      const double fd = (eval_legendre(n, x + eps) - eval_legendre(n, x - eps)) / (2 * eps);
      CHECK(std::abs(eval_legendre_deriv(n, x) - fd) <= 1e-7);
    }
  }
}

TEST_CASE("derivative identity 2(2n+1) P_n = (P_{n+1} - P_{n-1})'") {
  for (int n = 1; n <= 10; ++n) {
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      const double rhs = eval_legendre_deriv(n + 1, x) - eval_legendre_deriv(n - 1, x);
      CHECK(std::abs(2.0 * (2 * n + 1) * eval_legendre(n, x) - rhs) < 1e-10);
    }
  }
}

TEST_CASE("integrate_legendre") {
  for (double x : {0.0, 0.3, 0.71, 1.0}) {
    CHECK(integrate_legendre(0, x) == x);
    CHECK(std::abs(integrate_legendre(1, x) - (x * x - x)) < 1e-15);
  }
  for (int n = 1; n <= 12; ++n) {
    CHECK(integrate_legendre(n, 1.0) == 0.0);
  }

  SUBCASE("vanishes at the nodes of the rule with s+1 points") {
    for (int s = 1; s <= 8; ++s) {
      const auto rule = lobatto_rule(s);
      for (double c : rule.nodes) {
        CHECK(std::abs(integrate_legendre(s, c)) <= 1e-14);
      }
    }
  }

  SUBCASE("agrees with quadrature of P_n over [0,x]") {
    // A 12-point rule integrates P_n, n <= 10, exactly on any subinterval.
    const auto rule = lobatto_rule(12);
    for (int n = 0; n <= 10; ++n) {
      for (double x : {0.2, 0.55, 0.9}) {
        double q = 0.0;
        for (int i = 0; i < rule.npoints(); ++i) {
          q += x * rule.weights[i] * eval_legendre(n, x * rule.nodes[i]);
        }
        CHECK(std::abs(integrate_legendre(n, x) - q) < 1e-13);
      }
    }
  }
}

TEST_CASE("lobatto_rule small cases") {
  const auto r1 = lobatto_rule(1);
  CHECK(r1.nodes == std::vector<double>{0.0, 1.0});
  CHECK(r1.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r1.weights[1] == doctest::Approx(0.5).epsilon(1e-15));

  const auto r2 = lobatto_rule(2);
  CHECK(r2.nodes == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(std::abs(r2.weights[0] - 1.0 / 6) < 1e-15);
  CHECK(std::abs(r2.weights[1] - 2.0 / 3) < 1e-15);
  CHECK(std::abs(r2.weights[2] - 1.0 / 6) < 1e-15);

  const auto r6 = lobatto_rule(6);
  for (int q = 0; q <= 11; ++q) {
    double acc = 0.0;
    for (int i = 0; i <= 6; ++i) {
      acc += r6.weights[i] * std::pow(r6.nodes[i], q);
    }
    CHECK(std::abs(acc - 1.0 / (q + 1)) <= 1e-13);
  }

  CHECK_THROWS_AS((void)lobatto_rule(0), std::invalid_argument);
}

TEST_CASE("lobatto_rule invariants for k <= 20") {
  for (int k = 1; k <= 20; ++k) {
    CAPTURE(k);
    const auto rule = lobatto_rule(k);
    REQUIRE(rule.npoints() == k + 1);
    CHECK(rule.nodes.front() == 0.0);
    CHECK(rule.nodes.back() == 1.0);
    double sum = 0.0;
    for (int i = 0; i <= k; ++i) {
      if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
      CHECK(rule.weights[i] > 0.0);
      CHECK(std::abs(rule.nodes[i] + rule.nodes[k - i] - 1.0) <= 1e-14);
      CHECK(std::abs(rule.weights[i] - rule.weights[k - i]) <= 1e-14);
      sum += rule.weights[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
    for (int q = 0; q <= 2 * k - 1; ++q) {
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) {
        acc += rule.weights[i] * std::pow(rule.nodes[i], q);
      }
      CHECK(std::abs(acc - 1.0 / (q + 1)) <= 1e-13);
    }
    // Degree 2k is the first monomial the rule misses; its error decays
    // quickly with k, so only check where it is visible.
    if (k <= 8) {
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) {
        acc += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
      }
      CHECK(std::abs(acc - 1.0 / (2 * k + 1)) > 1e-10);
    }
  }
}

TEST_CASE("orthogonality under the Lobatto rule") {
  for (int k = 1; k <= 11; ++k) {
    const auto rule = lobatto_rule(k);
    for (int n = 0; n <= k - 1; ++n) {
      for (int m = 0; m <= k - 1; ++m) {
        double acc = 0.0;
        for (int i = 0; i <= k; ++i) {
          acc += rule.weights[i] * eval_legendre(n, rule.nodes[i]) * eval_legendre(m, rule.nodes[i]);
        }
        const double expected = n == m ? 1.0 / (2 * n + 1) : 0.0;
        CHECK(std::abs(acc - expected) <= 1e-12);
      }
    }
  }
}

TEST_CASE("reflection symmetry P_n(1-x) = (-1)^n P_n(x)") {
  for (int n = 0; n <= 10; ++n) {
    for (int i = 0; i <= 20; ++i) {
      const double x = i / 20.0;
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      CHECK(std::abs(eval_legendre(n, 1.0 - x) - sign * eval_legendre(n, x)) <= 1e-13);
    }
  }
}

TEST_CASE("shifted Legendre differential equation") {
  // d/dx[(x^2 - x) P_n'] = n(n+1) P_n, by central differences of the flux.
  const double eps = 1e-5;
  auto flux = [](int n, double x) { return (x * x - x) * eval_legendre_deriv(n, x); };
  for (int n = 0; n <= 8; ++n) {
    for (double x : {0.1, 0.35, 0.5, 0.8}) {
      const double lhs = (flux(n, x + eps) - flux(n, x - eps)) / (2 * eps);
      CHECK(std::abs(lhs - n * (n + 1.0) * eval_legendre(n, x)) <= 1e-5);
    }
  }
}
