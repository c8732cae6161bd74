#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "hamlearn/errors.hpp"
#include "hamlearn/pauli.hpp"

namespace hamlearn {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// 2^n x 2^n operator for exact small-system simulation
struct DenseOperator {
  int n = 0;
  Matrix m;

  DenseOperator() = default;
  DenseOperator(int n_, Matrix m_) : n(n_), m(std::move(m_)) {}

  static DenseOperator identity(int n) {
    const long d = 1L << n;
    return {n, Matrix::Identity(d, d)};
  }
};

// length-4^n Pauli coefficient vector of an operator U = sum_x U_x sigma_x
struct PauliSpectrum {
  int n = 0;
  std::vector<complex> coefficients;  // indexed by PauliString::index()

  double total_weight() const {
    double s = 0.0;
    for (const complex& c : coefficients) s += std::norm(c);
    return s;
  }
};

namespace detail {

inline const Matrix& single_qubit_matrix(int code) {
  static const Matrix mats[4] = {
      (Matrix(2, 2) << 1, 0, 0, 1).finished(),
      (Matrix(2, 2) << 0, 1, 1, 0).finished(),
      (Matrix(2, 2) << 0, complex(0, -1), complex(0, 1), 0).finished(),
      (Matrix(2, 2) << 1, 0, 0, -1).finished(),
  };
  return mats[code];
}

}  // namespace detail

inline Matrix pauli_dense(const PauliString& p) {
  require_dense(p.n, "pauli_dense");
  Matrix out = detail::single_qubit_matrix(p.code_at(1));
  for (int q = 2; q <= p.n; ++q) {
    const Matrix& f = detail::single_qubit_matrix(p.code_at(q));
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (int r = 0; r < out.rows(); ++r)
      for (int c = 0; c < out.cols(); ++c)
        next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
    out = std::move(next);
  }
  return out;
}

inline DenseOperator to_dense(const PauliHamiltonian& h) {
  require_dense(h.n(), "to_dense");
  const long d = 1L << h.n();
  Matrix out = Matrix::Zero(d, d);
  for (const auto& [p, mu] : h.terms()) out += mu * pauli_dense(p);
  return {h.n(), std::move(out)};
}

// Eigendecomposition of a Hamiltonian, reusable across evolution times.
class Propagator {
public:
  explicit Propagator(const PauliHamiltonian& h) : n_(h.n()) {
    require_dense(n_, "Propagator");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(to_dense(h).m);
    eigvals_ = solver.eigenvalues();
    eigvecs_ = solver.eigenvectors();
  }

  int n() const { return n_; }
  const Eigen::VectorXd& eigenvalues() const { return eigvals_; }

  // e^{-iHt}
  Matrix unitary(double t) const {
    const long d = eigvals_.size();
    Vector phases(d);
    for (long j = 0; j < d; ++j) phases(j) = std::exp(complex(0, -eigvals_(j) * t));
    return eigvecs_ * phases.asDiagonal() * eigvecs_.adjoint();
  }

  // |Tr[e^{-iHt}]|^2 / 4^n without building the unitary
  double identity_probability(double t) const {
    complex tr(0, 0);
    for (long j = 0; j < eigvals_.size(); ++j) tr += std::exp(complex(0, -eigvals_(j) * t));
    const double d = static_cast<double>(eigvals_.size());
    return std::norm(tr) / (d * d);
  }

private:
  int n_;
  Eigen::VectorXd eigvals_;
  Matrix eigvecs_;
};

// e^{-iHt} via Hermitian eigendecomposition
inline DenseOperator evolve(const PauliHamiltonian& h, double t) {
  return {h.n(), Propagator(h).unitary(t)};
}

inline double spectral_norm(const PauliHamiltonian& h) {
  if (h.empty()) return 0.0;
  require_dense(h.n(), "spectral_norm");
  Propagator prop(h);
  return std::max(std::abs(prop.eigenvalues().minCoeff()), std::abs(prop.eigenvalues().maxCoeff()));
}

// U_x = Tr[sigma_x U]/2^n for all 4^n strings, by n successive local
// basis changes on the vectorized operator: O(n 4^n) arithmetic.
inline PauliSpectrum pauli_spectrum(const DenseOperator& u) {
  const int n = u.n;
  const std::size_t size = 1ull << (2 * n);
  std::vector<complex> work(size);
  // pack entry (r, c) at the index interleaving per-qubit fields (r_j c_j)
  const long d = 1L << n;
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) {
      std::size_t idx = 0;
      for (int q = 0; q < n; ++q) {
        const int rb = static_cast<int>(r >> (n - 1 - q)) & 1;
        const int cb = static_cast<int>(c >> (n - 1 - q)) & 1;
        idx = idx * 4 + static_cast<std::size_t>((rb << 1) | cb);
      }
      work[idx] = u.m(r, c);
    }
  // per-qubit butterfly: matrix-element fields become Pauli codes I,X,Y,Z
  const complex half_i(0, 0.5);
  for (int q = 0; q < n; ++q) {
    const std::size_t stride = 1ull << (2 * (n - 1 - q));
    for (std::size_t base = 0; base < size; base += 4 * stride) {
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t i00 = base + off;
        const complex v00 = work[i00];
        const complex v01 = work[i00 + stride];
        const complex v10 = work[i00 + 2 * stride];
        const complex v11 = work[i00 + 3 * stride];
        work[i00] = 0.5 * (v00 + v11);               // I
        work[i00 + stride] = 0.5 * (v01 + v10);      // X
        work[i00 + 2 * stride] = half_i * (v01 - v10);  // Y
        work[i00 + 3 * stride] = 0.5 * (v00 - v11);  // Z
      }
    }
  }
  return {n, std::move(work)};
}

inline double identity_probability_exact(const PauliHamiltonian& h, double t) {
  require_dense(h.n(), "identity_probability_exact");
  const double p = Propagator(h).identity_probability(t);
  return std::min(1.0, std::max(0.0, p));
}

// ||(A (x) I)|Phi>|| via the Frobenius identity; never materializes the
// 4^n-dimensional state
inline double bell_state_norm(const DenseOperator& a) {
  return std::sqrt(a.m.squaredNorm() / static_cast<double>(1L << a.n));
}

inline std::vector<PauliString> enumerate_commutant(const PauliString& ps) {
  std::vector<PauliString> out;
  const std::uint64_t total = 1ull << (2 * ps.n);
  for (std::uint64_t ab = 0; ab < total; ++ab) {
    PauliString q(ps.n, ab >> ps.n, ab & ((1ull << ps.n) - 1));
    if (commutes(q, ps)) out.push_back(q);
  }
  return out;
}

// Exact commutant average (1/2^{2n-1}) sum_{Q in K_{P_s}} Q H Q.
// Exhaustive enumeration; n <= 3 only.
inline PauliHamiltonian twirl_average_exact(const PauliHamiltonian& h, const PauliString& ps) {
  if (h.n() != ps.n) throw std::invalid_argument("twirl_average_exact: qubit count mismatch");
  if (ps.n > 3) throw capability_error("twirl_average_exact: exhaustive enumeration needs n <= 3");
  const auto commutant = enumerate_commutant(ps);
  PauliHamiltonian out(h.n());
  const double norm = static_cast<double>(commutant.size());
  for (const auto& [p, mu] : h.terms()) {
    // Q P Q = +/- P; the sign is the commutation parity of Q and P
    long signed_count = 0;
    for (const PauliString& q : commutant) signed_count += commutes(q, p) ? 1 : -1;
    const double avg = mu * static_cast<double>(signed_count) / norm;
    if (std::abs(avg) > 1e-15) out.set_term(p, avg);
  }
  return out;
}

// U^r by repeated squaring
inline Matrix matrix_power(Matrix base, std::uint64_t r) {
  Matrix acc = Matrix::Identity(base.rows(), base.cols());
  while (r > 0) {
    if (r & 1) acc = acc * base;
    r >>= 1;
    if (r) base = base * base;
  }
  return acc;
}

}  // namespace hamlearn
