// Copyright 2026 The haarmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "haarmix/model.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

namespace haarmix {

SystemSpec SystemSpec::make(CMatrix H, CMatrix V, double sigma) {
  if (H.rows() != H.cols() || V.rows() != V.cols() || H.rows() != V.rows()) {
    throw DimensionError("SystemSpec: H and V must be square with equal dimension");
  }
  if (!is_hermitian(H) || !is_hermitian(V)) {
    throw NumericalError("SystemSpec: H and V must be Hermitian to 1e-12");
  }
  if (!(sigma >= 0.0)) {
    throw NumericalError("SystemSpec: sigma must be >= 0");
  }
  SystemSpec s;
  s.dim = H.rows();
  s.H = std::move(H);
  s.V = std::move(V);
  s.sigma = sigma;
  return s;
}

void ChainSpec::validate() const {
  if (length < 2) throw DimensionError("ChainSpec: length >= 2 required");
  if (control_site < 1 || control_site > length) {
    throw DimensionError("ChainSpec: control site must lie in [1, length]");
  }
}

SystemSpec chain_system(const ChainSpec& spec, double sigma) {
  spec.validate();
  const Index L = spec.length;
  CMatrix H = CMatrix::Zero(L, L);
  for (Index n = 0; n + 1 < L; ++n) {
    H(n, n + 1) = 1.0;
    H(n + 1, n) = 1.0;
  }
  CMatrix V = CMatrix::Zero(L, L);
  V(spec.control_site - 1, spec.control_site - 1) = 1.0;
  return SystemSpec::make(std::move(H), std::move(V), sigma);
}

bool is_coprime_controllable(const ChainSpec& spec) {
  spec.validate();
  return std::gcd(spec.control_site, spec.length + 1) == 1;
}

namespace {

// Real inner product Re tr(X^dag Y) on the space of anti-Hermitian matrices.
double real_dot(const CMatrix& x, const CMatrix& y) {
  return (x.adjoint() * y).trace().real();
}

CMatrix traceless_antihermitian(const CMatrix& h) {
  const Index d = h.rows();
  CMatrix a = kI * h;
  a -= (a.trace() / static_cast<double>(d)) * CMatrix::Identity(d, d);
  return a;
}

// Gram-Schmidt append; returns true if the residual was independent.
bool append_orthonormal(std::vector<CMatrix>& basis, CMatrix candidate, double tol) {
  for (const auto& b : basis) candidate -= real_dot(b, candidate) * b;
  // second pass for numerical safety
  for (const auto& b : basis) candidate -= real_dot(b, candidate) * b;
  const double norm = std::sqrt(real_dot(candidate, candidate));
  if (norm <= tol) return false;
  basis.push_back(candidate / norm);
  return true;
}

}  // namespace

int lie_algebra_dimension(const SystemSpec& sys, double tol, Index dim_cap) {
  if (sys.dim > dim_cap) {
    throw DimensionError("lie_algebra_dimension: dimension cap exceeded");
  }
  std::vector<CMatrix> basis;
  append_orthonormal(basis, traceless_antihermitian(sys.H), tol);
  append_orthonormal(basis, traceless_antihermitian(sys.V), tol);

  const std::size_t max_dim = static_cast<std::size_t>(sys.dim * sys.dim - 1);
  const std::size_t max_sweeps = static_cast<std::size_t>(sys.dim) * static_cast<std::size_t>(sys.dim) *
                                 static_cast<std::size_t>(sys.dim) * static_cast<std::size_t>(sys.dim);
  bool grew = true;
  std::size_t sweeps = 0;
  while (grew && basis.size() < max_dim && sweeps++ < max_sweeps) {
    grew = false;
    const std::size_t m = basis.size();
    for (std::size_t i = 0; i < m && basis.size() < max_dim; ++i) {
      for (std::size_t j = 0; j < i && basis.size() < max_dim; ++j) {
        CMatrix bracket = basis[i] * basis[j] - basis[j] * basis[i];
        if (append_orthonormal(basis, std::move(bracket), tol)) grew = true;
      }
    }
  }
  return static_cast<int>(basis.size());
}

int commutant_dimension(const SystemSpec& sys, int q, const NumericPolicy& policy) {
  const CMatrix hq = kron_sum_power(sys.H, q, policy.dense_cap);
  const CMatrix vq = kron_sum_power(sys.V, q, policy.dense_cap);
  const Index n = hq.rows();
  if (n * n > policy.dense_cap * policy.dense_cap) {
    throw DimensionError("commutant_dimension: dense cap exceeded");
  }
  CMatrix stacked(2 * n * n, n * n);
  stacked.topRows(n * n) = commutator_super(hq);
  stacked.bottomRows(n * n) = commutator_super(vq);
  const double scale = std::max(operator_norm(sys.H), operator_norm(sys.V));
  const CMatrix basis = null_space(stacked, 1e-9 * std::max(1.0, scale));
  return static_cast<int>(basis.cols());
}

std::vector<CMatrix> symmetry_obstruction(const SystemSpec& sys) {
  const Index d = sys.dim;
  const CMatrix id = CMatrix::Identity(d, d);
  // Q H^T + H Q = 0 reads (I x H + H x I)|Q>> = 0 in row-major vec.
  CMatrix stacked(2 * d * d, d * d);
  stacked.topRows(d * d) = kron(id, sys.H) + kron(sys.H, id);
  stacked.bottomRows(d * d) = kron(id, sys.V) + kron(sys.V, id);
  const double scale = std::max({1.0, operator_norm(sys.H), operator_norm(sys.V)});
  const CMatrix basis = null_space(stacked, 1e-9 * scale);
  std::vector<CMatrix> solutions;
  solutions.reserve(static_cast<std::size_t>(basis.cols()));
  for (Index c = 0; c < basis.cols(); ++c) solutions.push_back(unvec(basis.col(c)));
  return solutions;
}

SystemSpec counterexample_system(double eps, double sigma) {
  const CMatrix H = pauli_sum({{1.0, "XX"}, {1.0, "YY"}, {1.0, "XI"}, {eps, "ZZ"}});
  const CMatrix V = pauli_string("YI");
  return SystemSpec::make(H, V, sigma);
}

CMatrix pauli_matrix(char which) {
  CMatrix m(2, 2);
  switch (std::toupper(static_cast<unsigned char>(which))) {
    case 'I':
      m << 1, 0, 0, 1;
      return m;
    case 'X':
      m << 0, 1, 1, 0;
      return m;
    case 'Y':
      m << 0, Complex(0, -1), Complex(0, 1), 0;
      return m;
    case 'Z':
      m << 1, 0, 0, -1;
      return m;
    default:
      throw ConfigError("pauli", std::string("unknown Pauli label '") + which + "'");
  }
}

CMatrix pauli_string(const std::string& ops) {
  if (ops.empty()) throw ConfigError("pauli", "empty Pauli string");
  CMatrix m = pauli_matrix(ops[0]);
  for (std::size_t i = 1; i < ops.size(); ++i) m = kron(m, pauli_matrix(ops[i]));
  return m;
}

CMatrix pauli_sum(const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) throw ConfigError("pauli", "empty Pauli sum");
  CMatrix m = terms[0].first * pauli_string(terms[0].second);
  for (std::size_t i = 1; i < terms.size(); ++i) {
    const CMatrix t = pauli_string(terms[i].second);
    if (t.rows() != m.rows()) throw ConfigError("pauli", "mixed string lengths in Pauli sum");
    m += terms[i].first * t;
  }
  return m;
}

CMatrix parse_pauli_sum(const std::string& text) {
  std::vector<std::pair<double, std::string>> terms;
  std::istringstream in(text);
  double sign = 1.0;
  std::string token;
  while (in >> token) {
    if (token == "+") {
      sign = 1.0;
      continue;
    }
    if (token == "-") {
      sign = -1.0;
      continue;
    }
    double coeff = 0.0;
    std::string ops;
    try {
      std::size_t used = 0;
      coeff = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      if (!(in >> ops)) throw ConfigError("pauli", "coefficient without operator string");
    } catch (const std::invalid_argument&) {
      // bare string means unit coefficient
      coeff = 1.0;
      ops = token;
    }
    terms.emplace_back(sign * coeff, ops);
    sign = 1.0;
  }
  if (terms.empty()) throw ConfigError("pauli", "no terms in '" + text + "'");
  return pauli_sum(terms);
}

}  // namespace haarmix
