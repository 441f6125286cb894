#include "hbvm/tableau.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hbvm/legendre.hpp"
#include "json.hpp"

namespace hbvm {

namespace {

void require_ks(int k, int s) {
  if (s < 1 || k < s) {
    throw std::invalid_argument("HBVM(k,s) requires 1 <= s <= k, got k = " + std::to_string(k) +
                                ", s = " + std::to_string(s));
  }
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Pbar(i,l) = P_l(t_i), l < s.
Eigen::MatrixXd legendre_at_nodes(const Eigen::VectorXd& t, int s) {
  Eigen::MatrixXd out(t.size(), s);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const auto p = legendre_values(s - 1, t(i));
    for (int l = 0; l < s; ++l) {
      out(i, l) = p[l];
    }
  }
  return out;
}

// Ibar(i,l) = int_0^{t_i} P_l, l < s, by the closed-form antiderivative.
Eigen::MatrixXd legendre_integrals_at(const Eigen::VectorXd& t, int s) {
  Eigen::MatrixXd out(t.size(), s);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    for (int l = 0; l < s; ++l) {
      out(i, l) = integrate_legendre(l, t(i));
    }
  }
  return out;
}

Eigen::VectorXd odd_scaling(int s) {
  Eigen::VectorXd d(s);
  for (int l = 0; l < s; ++l) {
    d(l) = 2.0 * l + 1.0;
  }
  return d;
}

void append_number(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

}  // namespace

ButcherTableau hbvm_tableau(int k, int s) {
  require_ks(k, s);
  const auto rule = lobatto_rule(k);

  ButcherTableau tab;
  tab.k = k;
  tab.s = s;
  tab.nodes = to_eigen(rule.nodes);
  tab.weights = to_eigen(rule.weights);

  const Eigen::MatrixXd ibar = legendre_integrals_at(tab.nodes, s);
  const Eigen::MatrixXd pbar = legendre_at_nodes(tab.nodes, s);
  tab.C = ibar * odd_scaling(s).asDiagonal() * pbar.transpose() * tab.weights.asDiagonal();
  return tab;
}

ButcherTableau lobatto_iiia_tableau(int s) {
  if (s < 1) {
    throw std::invalid_argument("lobatto_iiia_tableau: s must be >= 1");
  }
  const auto rule = lobatto_rule(s);
  const int n = s + 1;
  const auto& c = rule.nodes;

  ButcherTableau tab;
  tab.k = s;
  tab.s = s;
  tab.nodes = to_eigen(c);
  tab.C.resize(n, n);

  for (int j = 0; j < n; ++j) {
    // Monomial coefficients of the Lagrange basis polynomial L_j.
    std::vector<double> poly{1.0};
    for (int m = 0; m < n; ++m) {
      if (m == j) {
        continue;
      }
      const double scale = 1.0 / (c[j] - c[m]);
      std::vector<double> next(poly.size() + 1, 0.0);
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d + 1] += poly[d] * scale;
        next[d] -= poly[d] * c[m] * scale;
      }
      poly = std::move(next);
    }
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      double power = c[i];
      for (std::size_t d = 0; d < poly.size(); ++d) {
        acc += poly[d] * power / static_cast<double>(d + 1);
        power *= c[i];
      }
      tab.C(i, j) = acc;
    }
  }
  tab.weights = tab.C.row(n - 1).transpose();
  return tab;
}

std::vector<int> default_fundamental_indices(int k, int s) {
  require_ks(k, s);
  std::vector<int> out(static_cast<std::size_t>(s) + 1);
  for (int j = 0; j <= s; ++j) {
    out[j] = static_cast<int>(std::lround(static_cast<double>(j) * k / s));
  }
  return out;
}

BlockPencil block_pencil(int k, int s, const std::vector<int>& fundamental_indices) {
  require_ks(k, s);
  const auto& ind_s = fundamental_indices;
  if (static_cast<int>(ind_s.size()) != s + 1) {
    throw std::invalid_argument("block_pencil: expected s+1 fundamental indices");
  }
  if (ind_s.front() != 0 || ind_s.back() != k) {
    throw std::invalid_argument("block_pencil: fundamental indices must contain 0 and k");
  }
  for (std::size_t i = 1; i < ind_s.size(); ++i) {
    if (ind_s[i] <= ind_s[i - 1]) {
      throw std::invalid_argument("block_pencil: fundamental indices must be strictly increasing");
    }
  }

  BlockPencil pencil;
  pencil.k = k;
  pencil.s = s;
  pencil.fundamental_indices = ind_s;
  for (int i = 0; i <= k; ++i) {
    if (!std::binary_search(ind_s.begin(), ind_s.end(), i)) {
      pencil.silent_indices.push_back(i);
    }
  }
  const auto& ind_r = pencil.silent_indices;
  const int r = k - s;

  const auto rule = lobatto_rule(k);
  const Eigen::VectorXd t = to_eigen(rule.nodes);
  const Eigen::VectorXd b = to_eigen(rule.weights);

  // Integrals of P_0..P_{s-1} up to the fundamental abscissae c_1..c_s.
  Eigen::VectorXd c(s);
  for (int i = 0; i < s; ++i) {
    c(i) = t(ind_s[i + 1]);
  }
  const Eigen::MatrixXd ifund = legendre_integrals_at(c, s);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(ifund);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("block_pencil: singular interpolation matrix for these indices");
  }

  pencil.A = Eigen::MatrixXd::Zero(k, k + 1);
  pencil.B = Eigen::MatrixXd::Zero(k, k + 1);

  // (-e | I_s) on the fundamental columns.
  Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(s, s + 1);
  diff.col(0).setConstant(-1.0);
  diff.rightCols(s).setIdentity();

  for (int i = 0; i < s; ++i) {
    for (int j = 0; j <= s; ++j) {
      pencil.A(i, ind_s[j]) = diff(i, j);
    }
  }
  pencil.B.topRows(s) =
      ifund * odd_scaling(s).asDiagonal() * legendre_at_nodes(t, s).transpose() * b.asDiagonal();

  if (r > 0) {
    Eigen::VectorXd tau(r);
    for (int i = 0; i < r; ++i) {
      tau(i) = t(ind_r[i]);
    }
    const Eigen::MatrixXd isilent = legendre_integrals_at(tau, s);
    Eigen::MatrixXd silent_fund = -isilent * lu.solve(diff);
    silent_fund.col(0).array() -= 1.0;
    for (int i = 0; i < r; ++i) {
      pencil.A(s + i, ind_r[i]) = 1.0;
      for (int j = 0; j <= s; ++j) {
        pencil.A(s + i, ind_s[j]) = silent_fund(i, j);
      }
    }
  }
  return pencil;
}

SimplifyingReport check_simplifying_conditions(const ButcherTableau& tab, double tol) {
  const Eigen::Index n = tab.stages();
  const auto& c = tab.nodes;
  const auto& b = tab.weights;
  const auto& a = tab.C;
  // No condition can hold beyond twice the stage count; the cap only bounds
  // the search for degenerate input.
  const int cap = 2 * static_cast<int>(n) + 2;

  auto largest = [&](auto&& residual) {
    int q = 0;
    while (q < cap && residual(q + 1) <= tol) {
      ++q;
    }
    return q;
  };

  SimplifyingReport rep;
  rep.B_order = largest([&](int q) {
    return std::abs(b.dot(c.array().pow(q - 1).matrix()) - 1.0 / q);
  });
  rep.C_order = largest([&](int q) {
    const Eigen::VectorXd lhs = a * c.array().pow(q - 1).matrix();
    const Eigen::VectorXd rhs = c.array().pow(q) / q;
    return (lhs - rhs).cwiseAbs().maxCoeff();
  });
  rep.D_order = largest([&](int q) {
    const Eigen::VectorXd bc = (b.array() * c.array().pow(q - 1)).matrix();
    const Eigen::VectorXd lhs = a.transpose() * bc;
    const Eigen::VectorXd rhs = (b.array() * (1.0 - c.array().pow(q))) / q;
    return (lhs - rhs).cwiseAbs().maxCoeff();
  });
  return rep;
}

double check_symmetry(const ButcherTableau& tab) {
  const Eigen::Index n = tab.stages();
  // Rows of L C are C(i+1,:) - C(i,:).
  const Eigen::MatrixXd lc = tab.C.bottomRows(n - 1) - tab.C.topRows(n - 1);
  const Eigen::MatrixXd flipped = lc.colwise().reverse().rowwise().reverse();
  return (flipped - lc).cwiseAbs().maxCoeff();
}

int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) {
    return 0;
  }
  return static_cast<int>((sv.array() > rel_tol * sv(0)).count());
}

std::complex<double> stability_function(const ButcherTableau& tab, std::complex<double> z) {
  const Eigen::Index n = tab.stages();
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) - z * tab.C.cast<std::complex<double>>();
  const Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  if (!lu.isInvertible()) {
    throw SingularSystemError("stability_function: I - zC is singular");
  }
  const Eigen::VectorXcd x = lu.solve(Eigen::VectorXcd::Ones(n));
  return 1.0 + z * (tab.weights.cast<std::complex<double>>().transpose() * x)(0);
}

std::string tableau_to_json(const ButcherTableau& tab) {
  std::string out = "{\"k\":" + std::to_string(tab.k) + ",\"s\":" + std::to_string(tab.s);
  auto vec = [&out](const char* name, const Eigen::VectorXd& v) {
    out += ",\"";
    out += name;
    out += "\":[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i > 0) out += ',';
      append_number(out, v(i));
    }
    out += ']';
  };
  vec("nodes", tab.nodes);
  vec("weights", tab.weights);
  out += ",\"C\":[";
  for (Eigen::Index i = 0; i < tab.C.rows(); ++i) {
    if (i > 0) out += ',';
    out += '[';
    for (Eigen::Index j = 0; j < tab.C.cols(); ++j) {
      if (j > 0) out += ',';
      append_number(out, tab.C(i, j));
    }
    out += ']';
  }
  out += "]}";
  return out;
}

ButcherTableau tableau_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("tableau_from_json: ") + e.what());
  }
  try {
    ButcherTableau tab;
    tab.k = doc.at("k").get<int>();
    tab.s = doc.at("s").get<int>();
    const auto nodes = doc.at("nodes").get<std::vector<double>>();
    const auto weights = doc.at("weights").get<std::vector<double>>();
    const auto rows = doc.at("C").get<std::vector<std::vector<double>>>();
    const auto n = nodes.size();
    if (n != static_cast<std::size_t>(tab.k) + 1 || weights.size() != n || rows.size() != n) {
      throw std::invalid_argument("tableau_from_json: inconsistent sizes");
    }
    tab.nodes = to_eigen(nodes);
    tab.weights = to_eigen(weights);
    tab.C.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        throw std::invalid_argument("tableau_from_json: C is not square");
      }
      for (std::size_t j = 0; j < n; ++j) {
        tab.C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    return tab;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("tableau_from_json: ") + e.what());
  }
}

std::string tableau_to_csv(const ButcherTableau& tab) {
  const Eigen::Index n = tab.stages();
  std::string out = "i,t,b";
  for (Eigen::Index j = 0; j < n; ++j) {
    out += ",C_" + std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out += std::to_string(i);
    out += ',';
    append_number(out, tab.nodes(i));
    out += ',';
    append_number(out, tab.weights(i));
    for (Eigen::Index j = 0; j < n; ++j) {
      out += ',';
      append_number(out, tab.C(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace hbvm
