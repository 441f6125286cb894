#include "hbvm/hamiltonians.hpp"

#include <array>
#include <cmath>

namespace hbvm {

Eigen::VectorXd apply_J(const Eigen::VectorXd& v) {
  if (v.size() % 2 != 0) {
    throw std::invalid_argument("apply_J: vector length must be even");
  }
  const Eigen::Index m = v.size() / 2;
  Eigen::VectorXd out(v.size());
  out.head(m) = v.tail(m);
  out.tail(m) = -v.head(m);
  return out;
}

CanonicalSystem problem_fhp() {
  CanonicalSystem sys;
  sys.name = "fhp";
  sys.m = 1;
  sys.poly_degree = 6;
  sys.initial_state = (State(2) << 0.0, 1.0).finished();
  sys.hamiltonian = [](const State& y) {
    const double q = y(0);
    const double p = y(1);
    const double q2 = q * q;
    return p * p * p / 3.0 - p / 2.0 + q2 * q2 * q2 / 30.0 + q2 * q2 / 4.0 - q2 * q / 3.0 + 1.0 / 6.0;
  };
  sys.gradient = [](const State& y) {
    const double q = y(0);
    const double p = y(1);
    const double q2 = q * q;
    Eigen::VectorXd g(2);
    g(0) = q2 * q2 * q / 5.0 + q2 * q - q2;
    g(1) = p * p - 0.5;
    return g;
  };
  return sys;
}

namespace {

constexpr int kFpuSprings = 3;
constexpr double kFpuOmega = 50.0;

// q padded with the fixed ends q_0 = q_{2m+1} = 0.
std::array<double, 2 * kFpuSprings + 2> fpu_positions(const State& y) {
  std::array<double, 2 * kFpuSprings + 2> q{};
  for (int i = 1; i <= 2 * kFpuSprings; ++i) {
    q[i] = y(i - 1);
  }
  return q;
}

}  // namespace

CanonicalSystem problem_fpu() {
  constexpr int n = 2 * kFpuSprings;
  CanonicalSystem sys;
  sys.name = "fpu";
  sys.m = n;
  sys.poly_degree = 4;
  sys.initial_state = State::Zero(2 * n);
  for (int i = 1; i <= n; ++i) {
    sys.initial_state(i - 1) = (i - 1) / 10.0;
  }
  sys.hamiltonian = [](const State& y) {
    const auto q = fpu_positions(y);
    const double w2 = kFpuOmega * kFpuOmega;
    double kinetic = 0.0;
    for (int i = 0; i < n; ++i) {
      kinetic += y(n + i) * y(n + i);
    }
    double stiff = 0.0;
    for (int i = 1; i <= kFpuSprings; ++i) {
      const double d = q[2 * i] - q[2 * i - 1];
      stiff += d * d;
    }
    double soft = 0.0;
    for (int i = 0; i <= kFpuSprings; ++i) {
      const double d = q[2 * i + 1] - q[2 * i];
      soft += d * d * d * d;
    }
    return 0.5 * kinetic + 0.25 * w2 * stiff + soft;
  };
  sys.gradient = [](const State& y) {
    const auto q = fpu_positions(y);
    const double w2 = kFpuOmega * kFpuOmega;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * n);
    // Stiff springs join q_{2i-1} and q_{2i}.
    for (int i = 1; i <= kFpuSprings; ++i) {
      const double f = 0.5 * w2 * (q[2 * i] - q[2 * i - 1]);
      g(2 * i - 1) += f;
      g(2 * i - 2) -= f;
    }
    // Soft springs join q_{2i} and q_{2i+1}; the ghost ends carry no gradient.
    for (int i = 0; i <= kFpuSprings; ++i) {
      const double d = q[2 * i + 1] - q[2 * i];
      const double f = 4.0 * d * d * d;
      if (2 * i + 1 <= n) g(2 * i) += f;
      if (2 * i >= 1) g(2 * i - 1) -= f;
    }
    g.tail(n) = y.tail(n);
    return g;
  };
  return sys;
}

namespace {

constexpr double kBiotAlpha = -1.0;  // e * B_0
constexpr double kBiotMass = 1.0;

double biot_rho2(const State& y) {
  const double rho2 = y(0) * y(0) + y(1) * y(1);
  if (!(rho2 > 0.0)) {
    throw DomainError("biot: potential is singular at rho = 0");
  }
  return rho2;
}

}  // namespace

CanonicalSystem problem_biot() {
  CanonicalSystem sys;
  sys.name = "biot";
  sys.m = 3;
  sys.initial_state = (State(6) << 0.5, 10.0, 0.0, -0.1, -0.3, 0.0).finished();
  sys.hamiltonian = [](const State& y) {
    const double rho2 = biot_rho2(y);
    const double u = y(3) - kBiotAlpha * y(0) / rho2;
    const double v = y(4) - kBiotAlpha * y(1) / rho2;
    const double w = y(5) + kBiotAlpha * 0.5 * std::log(rho2);
    return (u * u + v * v + w * w) / (2.0 * kBiotMass);
  };
  sys.gradient = [](const State& y) {
    const double x = y(0);
    const double yy = y(1);
    const double rho2 = biot_rho2(y);
    const double rho4 = rho2 * rho2;
    const double a = kBiotAlpha;
    const double u = (y(3) - a * x / rho2) / kBiotMass;
    const double v = (y(4) - a * yy / rho2) / kBiotMass;
    const double w = (y(5) + a * 0.5 * std::log(rho2)) / kBiotMass;
    // Partial derivatives of the three shifted momenta in x and y.
    const double du_dx = -a * (rho2 - 2.0 * x * x) / rho4;
    const double cross = 2.0 * a * x * yy / rho4;
    const double dv_dy = -a * (rho2 - 2.0 * yy * yy) / rho4;
    const double dw_dx = a * x / rho2;
    const double dw_dy = a * yy / rho2;
    Eigen::VectorXd g(6);
    g(0) = u * du_dx + v * cross + w * dw_dx;
    g(1) = u * cross + v * dv_dy + w * dw_dy;
    g(2) = 0.0;
    g(3) = u;
    g(4) = v;
    g(5) = w;
    return g;
  };
  return sys;
}

CanonicalSystem problem_harmonic() {
  CanonicalSystem sys;
  sys.name = "harmonic";
  sys.m = 1;
  sys.poly_degree = 2;
  sys.initial_state = (State(2) << 1.0, 0.0).finished();
  sys.hamiltonian = [](const State& y) { return 0.5 * (y(0) * y(0) + y(1) * y(1)); };
  sys.gradient = [](const State& y) -> Eigen::VectorXd { return y; };
  return sys;
}

std::vector<std::string> problem_names() { return {"fhp", "fpu", "biot", "harmonic"}; }

CanonicalSystem make_problem(const std::string& name) {
  if (name == "fhp") return problem_fhp();
  if (name == "fpu") return problem_fpu();
  if (name == "biot") return problem_biot();
  if (name == "harmonic") return problem_harmonic();
  throw std::invalid_argument("unknown problem '" + name + "' (expected fhp, fpu, biot or harmonic)");
}

Eigen::VectorXd finite_difference_gradient(const CanonicalSystem& system, const State& y,
                                           double step) {
  if (!(step > 0.0)) {
    throw std::invalid_argument("finite_difference_gradient: step must be positive");
  }
  Eigen::VectorXd g(y.size());
  State probe = y;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    probe(i) = y(i) + step;
    const double up = system.hamiltonian(probe);
    probe(i) = y(i) - step;
    const double down = system.hamiltonian(probe);
    probe(i) = y(i);
    g(i) = (up - down) / (2.0 * step);
  }
  return g;
}

}  // namespace hbvm
