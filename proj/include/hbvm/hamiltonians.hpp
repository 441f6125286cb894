#pragma once

// Canonical Hamiltonian systems y' = J grad H(y), state y = (q_1..q_m, p_1..p_m).

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hbvm {

using State = Eigen::VectorXd;

/// Raised when H or its gradient is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// J v = (v_p, -v_q) for v = (v_q, v_p). Throws std::invalid_argument on odd length.
[[nodiscard]] Eigen::VectorXd apply_J(const Eigen::VectorXd& v);

struct CanonicalSystem {
  std::string name;
  int m = 0;  // half-dimension
  std::function<double(const State&)> hamiltonian;
  std::function<Eigen::VectorXd(const State&)> gradient;
  std::optional<int> poly_degree;  // empty for non-polynomial H
  State initial_state;

  [[nodiscard]] int dimension() const { return 2 * m; }
  [[nodiscard]] double energy(const State& y) const { return hamiltonian(y); }
  [[nodiscard]] Eigen::VectorXd vector_field(const State& y) const { return apply_J(gradient(y)); }
};

/// H = p^3/3 - p/2 + q^6/30 + q^4/4 - q^3/3 + 1/6, from (q,p) = (0,1).
[[nodiscard]] CanonicalSystem problem_fhp();

/// Fermi-Pasta-Ulam chain with three stiff springs (omega = 50), six q and
/// six p, from q_i = (i-1)/10, p_i = 0.
[[nodiscard]] CanonicalSystem problem_fpu();

/// Charged particle in a Biot-Savart magnetic field (unit mass, alpha = e B_0 = -1).
/// Throws DomainError where rho = sqrt(x^2 + y^2) vanishes.
[[nodiscard]] CanonicalSystem problem_biot();

/// H = (q^2 + p^2)/2 from (1, 0).
[[nodiscard]] CanonicalSystem problem_harmonic();

/// Registry lookup: "fhp", "fpu", "biot", "harmonic".
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] CanonicalSystem make_problem(const std::string& name);
[[nodiscard]] std::vector<std::string> problem_names();

/// Central differences (H(y + eps e_i) - H(y - eps e_i)) / (2 eps).
[[nodiscard]] Eigen::VectorXd finite_difference_gradient(const CanonicalSystem& system,
                                                         const State& y, double step);

}  // namespace hbvm
