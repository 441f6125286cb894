#pragma once

// HBVM(k,s) Runge-Kutta tableaux, the block pencil (A,B) and tableau
// validators.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hbvm {

/// Runge-Kutta form of HBVM(k,s): k+1 Lobatto stages, rank-s coefficient
/// matrix. The last row of C equals the weights, so the method is stiffly
/// accurate and the update is the last stage.
struct ButcherTableau {
  int k = 0;
  int s = 0;
  Eigen::VectorXd nodes;    // t_0 .. t_k
  Eigen::VectorXd weights;  // b_0 .. b_k
  Eigen::MatrixXd C;        // (k+1) x (k+1)

  [[nodiscard]] int r() const { return k - s; }
  [[nodiscard]] int stages() const { return static_cast<int>(nodes.size()); }
};

/// C = Ibar * D_s * Pbar^T * Omega, with Ibar(i,l) = int_0^{t_i} P_l,
/// Pbar(j,l) = P_l(t_j), D_s = diag(1,3,..,2s-1), Omega = diag(b).
/// Requires 1 <= s <= k.
[[nodiscard]] ButcherTableau hbvm_tableau(int k, int s);

/// Classical Lobatto IIIA collocation tableau on s+1 nodes, built directly
/// from the Lagrange basis: C(i,j) = int_0^{c_i} L_j(x) dx.
[[nodiscard]] ButcherTableau lobatto_iiia_tableau(int s);

/// Block form of HBVM(k,s): A ŷ = h B f(ŷ), both k x (k+1).
/// Rows [0, s) come from the orthogonality conditions; rows [s, k) are the
/// silent-stage interpolation conditions and have zero B rows.
struct BlockPencil {
  int k = 0;
  int s = 0;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  std::vector<int> fundamental_indices;  // s+1 entries, includes 0 and k
  std::vector<int> silent_indices;       // k-s entries
};

/// {0, round(k/s), round(2k/s), ..., k}
[[nodiscard]] std::vector<int> default_fundamental_indices(int k, int s);

/// Throws std::invalid_argument for malformed indices (wrong count, not
/// strictly increasing, out of range, missing 0 or k).
[[nodiscard]] BlockPencil block_pencil(int k, int s, const std::vector<int>& fundamental_indices);

struct SimplifyingReport {
  int B_order = 0;
  int C_order = 0;
  int D_order = 0;

  /// Highest monomial degree the weights integrate exactly (B_order - 1).
  [[nodiscard]] int quadrature_degree() const { return B_order - 1; }
};

/// Largest q for which B(q), C(q), D(q) hold within `tol` (max abs residual).
[[nodiscard]] SimplifyingReport check_simplifying_conditions(const ButcherTableau& tab,
                                                             double tol = 1e-11);

/// max |E_k L C E_{k+1} - L C| with L the k x (k+1) forward difference.
/// Zero (up to round-off) for symmetric methods.
[[nodiscard]] double check_symmetry(const ButcherTableau& tab);

/// Number of singular values of C above rel_tol * sigma_max.
[[nodiscard]] int numerical_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-12);

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// R(z) = 1 + z b^T (I - zC)^{-1} 1. Throws SingularSystemError at a pole.
[[nodiscard]] std::complex<double> stability_function(const ButcherTableau& tab,
                                                      std::complex<double> z);

/// {"k":..,"s":..,"nodes":[..],"weights":[..],"C":[[..],..]}, 17 significant digits.
[[nodiscard]] std::string tableau_to_json(const ButcherTableau& tab);

/// Inverse of tableau_to_json. Throws std::invalid_argument on shape errors.
[[nodiscard]] ButcherTableau tableau_from_json(const std::string& text);

/// Header "i,t,b,C_0,...,C_k", one row per stage.
[[nodiscard]] std::string tableau_to_csv(const ButcherTableau& tab);

}  // namespace hbvm
