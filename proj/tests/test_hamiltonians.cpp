#include <cmath>
#include <random>

#include "doctest.h"
#include "hbvm/hamiltonians.hpp"

using namespace hbvm;

namespace {

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>() / (1.0 + b.lpNorm<Eigen::Infinity>());
}

Eigen::VectorXd fd_gradient(const CanonicalSystem& sys, const State& y) {
  return finite_difference_gradient(sys, y, 1e-6 * (1.0 + y.lpNorm<Eigen::Infinity>()));
}

State random_state(const CanonicalSystem& sys, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  State y(sys.dimension());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = u(rng);
  if (sys.name == "biot") {
    // Keep away from the singular axis rho = 0.
    y(0) = 0.5 + 4.5 * std::abs(y(0));
    y(1) = 5.0 * y(1);
  }
  return y;
}

}  // namespace

TEST_CASE("apply_J") {
  const Eigen::Vector2d e1(1.0, 0.0);
  CHECK(apply_J(e1) == Eigen::VectorXd(Eigen::Vector2d(0.0, -1.0)));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd v(12);
    for (auto& x : v) x = n01(rng);
    CHECK(apply_J(apply_J(v)) == -v);
    CHECK(std::abs(v.dot(apply_J(v))) < 1e-14 * v.squaredNorm());
  }
  CHECK_THROWS_AS((void)apply_J(Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("fhp") {
  const auto sys = problem_fhp();
  CHECK(sys.m == 1);
  CHECK(sys.poly_degree == 6);
  CHECK(sys.initial_state == Eigen::VectorXd(Eigen::Vector2d(0.0, 1.0)));
  CHECK(std::abs(sys.energy(sys.initial_state)) < 1e-16);
  CHECK((sys.gradient(sys.initial_state) - Eigen::Vector2d(0.0, 0.5)).norm() == 0.0);

  const State y = Eigen::Vector2d(0.3, 0.7);
  CHECK(sys.energy(y) == doctest::Approx(-0.0759507).epsilon(1e-14));
  CHECK((sys.gradient(y) - Eigen::Vector2d(-0.062514, -0.01)).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK(rel_err(fd_gradient(sys, y), sys.gradient(y)) <= 1e-7);
}

TEST_CASE("fpu") {
  const auto sys = problem_fpu();
  CHECK(sys.m == 6);
  CHECK(sys.poly_degree == 4);
  const State& y0 = sys.initial_state;
  for (int i = 1; i <= 6; ++i) {
    CHECK(y0(i - 1) == (i - 1) / 10.0);
    CHECK(y0(5 + i) == 0.0);
  }
  CHECK(sys.energy(y0) == doctest::Approx(18.8127).epsilon(1e-14));
  CHECK(sys.energy(State::Zero(12)) == 0.0);

  Eigen::VectorXd expected = Eigen::VectorXd::Zero(12);
  expected.head(6) << -125.0, 124.996, -124.996, 124.996, -124.996, 125.5;
  CHECK((sys.gradient(y0) - expected).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(rel_err(fd_gradient(sys, y0), sys.gradient(y0)) <= 1e-6);
}

TEST_CASE("biot") {
  const auto sys = problem_biot();
  CHECK(sys.m == 3);
  CHECK_FALSE(sys.poly_degree.has_value());
  const State& y0 = sys.initial_state;
  CHECK(sys.energy(y0) == doctest::Approx(2.6783880651251131061).epsilon(1e-14));

  Eigen::VectorXd expected(6);
  expected << 0.010746665092510980065, 0.23189090783525700778, 0.0, -0.095012468827930174564,
      -0.20024937655860349127, -2.3038335330933392835;
  CHECK((sys.gradient(y0) - expected).lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK(rel_err(fd_gradient(sys, y0), sys.gradient(y0)) <= 1e-6);

  State axis = y0;
  axis(0) = 0.0;
  axis(1) = 0.0;
  CHECK_THROWS_AS((void)sys.energy(axis), DomainError);
  CHECK_THROWS_AS((void)sys.gradient(axis), DomainError);
}

TEST_CASE("harmonic") {
  const auto sys = problem_harmonic();
  CHECK(sys.poly_degree == 2);
  CHECK(sys.energy(sys.initial_state) == 0.5);
  const State y = Eigen::Vector2d(0.3, -1.7);
  CHECK(sys.vector_field(y) == Eigen::VectorXd(Eigen::Vector2d(-1.7, -0.3)));
}

TEST_CASE("finite_difference_gradient") {
  CanonicalSystem linear;
  linear.name = "linear";
  linear.m = 2;
  linear.hamiltonian = [](const State& y) { return y.sum(); };
  linear.gradient = [](const State& y) -> Eigen::VectorXd { return Eigen::VectorXd::Ones(y.size()); };
  const State y = (State(4) << 0.1, -2.0, 3.0, 0.5).finished();
  CHECK((finite_difference_gradient(linear, y, 1e-3) - Eigen::VectorXd::Ones(4)).lpNorm<Eigen::Infinity>() <
        1e-12);

  const auto fhp = problem_fhp();
  CHECK((finite_difference_gradient(fhp, fhp.initial_state, 1e-6) - Eigen::Vector2d(0.0, 0.5))
            .lpNorm<Eigen::Infinity>() <= 1e-8);

  const auto osc = problem_harmonic();
  for (double eps : {1e-4, 0.1, 0.7}) {
    // Exact apart from the rounding of H, amplified by 1/eps.
    CHECK((finite_difference_gradient(osc, y.head(2), eps) - y.head(2)).lpNorm<Eigen::Infinity>() <
          1e-14 / eps);
  }

  CHECK_THROWS_AS((void)finite_difference_gradient(fhp, fhp.initial_state, 0.0), std::invalid_argument);

  const auto biot = problem_biot();
  State near_axis = biot.initial_state;
  near_axis(0) = 0.0;
  near_axis(1) = 1e-6;  // the y - eps probe lands on the axis
  CHECK_THROWS_AS((void)finite_difference_gradient(biot, near_axis, 1e-6), DomainError);
}

TEST_CASE("packaged systems: gradients and skew-symmetry at random states") {
  std::mt19937_64 rng(20240607);
  for (const auto& name : problem_names()) {
    CAPTURE(name);
    const auto sys = make_problem(name);
    CHECK(sys.name == name);
    CHECK(sys.initial_state.size() == sys.dimension());
    for (int trial = 0; trial < 20; ++trial) {
      const State y = random_state(sys, rng);
      const Eigen::VectorXd g = sys.gradient(y);
      CHECK(rel_err(fd_gradient(sys, y), g) <= 1e-6);
      CHECK(std::abs(g.dot(sys.vector_field(y))) <= 1e-12 * (1.0 + g.squaredNorm()));
    }
  }
}

TEST_CASE("registry") {
  CHECK(problem_names() == std::vector<std::string>{"fhp", "fpu", "biot", "harmonic"});
  CHECK_THROWS_AS((void)make_problem("kepler"), std::invalid_argument);
}
