#pragma once

#include <vector>

#include "hamlearn/dense.hpp"
#include "hamlearn/pauli.hpp"

// Independent reference computations the fast paths are checked against.
// Everything here is deliberately naive.
namespace oracle_ref {

using hamlearn::complex;
using hamlearn::DenseOperator;
using hamlearn::Matrix;
using hamlearn::PauliString;
using hamlearn::Vector;

// U_x = Tr[sigma_x U] / 2^n, one explicit trace per Pauli string
inline std::vector<complex> naive_pauli_spectrum(const DenseOperator& u) {
  const std::uint64_t count = 1ull << (2 * u.n);
  const double dim = static_cast<double>(1L << u.n);
  std::vector<complex> out(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    const Matrix sigma = hamlearn::pauli_dense(PauliString::from_index(u.n, idx));
    out[idx] = (sigma * u.m).trace() / dim;
  }
  return out;
}

// ||(A (x) I)|Phi>|| with the 4^n-dimensional state built explicitly;
// |Phi> = (x)_j (|00> + |11>)/sqrt(2) with system qubit j paired with
// ancilla qubit j
inline double explicit_bell_state_norm(const DenseOperator& a) {
  const long d = 1L << a.n;
  // |Phi> = (1/sqrt(d)) sum_k |k>|k>
  Vector phi = Vector::Zero(static_cast<long>(d) * d);
  for (long k = 0; k < d; ++k) phi(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
  Vector out = Vector::Zero(phi.size());
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) {
      if (a.m(r, c) == complex(0, 0)) continue;
      for (long anc = 0; anc < d; ++anc) out(r * d + anc) += a.m(r, c) * phi(c * d + anc);
    }
  return out.norm();
}

inline bool dense_commutes(const PauliString& p, const PauliString& q) {
  const Matrix mp = hamlearn::pauli_dense(p);
  const Matrix mq = hamlearn::pauli_dense(q);
  return (mp * mq - mq * mp).cwiseAbs().maxCoeff() < 1e-12;
}

}  // namespace oracle_ref
