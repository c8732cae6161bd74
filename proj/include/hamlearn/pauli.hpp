#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "hamlearn/rng.hpp"

namespace hamlearn {

using complex = std::complex<double>;

// An n-qubit Pauli operator in the bit-pair encoding
//   sigma_{ab} = (x) over qubits j of i^{a_j b_j} X^{a_j} Z^{b_j}.
// Every such operator is Hermitian and unitary. Bit j of a/b belongs to
// qubit j+1; qubit 1 is the leftmost character in the text form.
struct PauliString {
  int n = 0;
  std::uint64_t a = 0;  // X part
  std::uint64_t b = 0;  // Z part

  PauliString() = default;
  PauliString(int n_, std::uint64_t a_, std::uint64_t b_) : n(n_), a(a_), b(b_) {
    if (n_ < 1 || n_ > 32) throw std::invalid_argument("PauliString: bad qubit count");
    const std::uint64_t mask = (n_ == 64) ? ~0ull : ((1ull << n_) - 1);
    if ((a_ & ~mask) || (b_ & ~mask)) throw std::invalid_argument("PauliString: bits out of range");
  }

  static PauliString identity(int n) { return PauliString(n, 0, 0); }

  bool is_identity() const { return a == 0 && b == 0; }

  int weight() const { return std::popcount(a | b); }

  // single-qubit code at qubit q (1-based): 0=I, 1=X, 2=Y, 3=Z
  int code_at(int q) const {
    const int ab = static_cast<int>(a >> (q - 1)) & 1;
    const int bb = static_cast<int>(b >> (q - 1)) & 1;
    if (ab && bb) return 2;
    if (ab) return 1;
    if (bb) return 3;
    return 0;
  }

  // first qubit (1-based) on which the operator acts non-trivially; 0 if identity
  int first_support() const {
    const std::uint64_t s = a | b;
    if (s == 0) return 0;
    for (int q = 1; q <= n; ++q)
      if ((s >> (q - 1)) & 1) return q;
    return 0;
  }

  std::string str() const {
    static const char names[] = "IXYZ";
    std::string out(n, 'I');
    for (int q = 1; q <= n; ++q) out[q - 1] = names[code_at(q)];
    return out;
  }

  static PauliString parse(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("PauliString: empty text");
    PauliString p(static_cast<int>(s.size()), 0, 0);
    for (int q = 1; q <= p.n; ++q) {
      switch (s[q - 1]) {
        case 'I': break;
        case 'X': p.a |= 1ull << (q - 1); break;
        case 'Y': p.a |= 1ull << (q - 1); p.b |= 1ull << (q - 1); break;
        case 'Z': p.b |= 1ull << (q - 1); break;
        default: throw std::invalid_argument("PauliString: bad character in " + s);
      }
    }
    return p;
  }

  // linear index with qubit 1 in the most significant 2-bit field,
  // per-qubit codes ordered I, X, Y, Z
  std::uint64_t index() const {
    std::uint64_t idx = 0;
    for (int q = 1; q <= n; ++q) idx = idx * 4 + static_cast<std::uint64_t>(code_at(q));
    return idx;
  }

  static PauliString from_index(int n, std::uint64_t idx) {
    PauliString p(n, 0, 0);
    for (int q = n; q >= 1; --q) {
      const int code = static_cast<int>(idx & 3);
      idx >>= 2;
      if (code == 1 || code == 2) p.a |= 1ull << (q - 1);
      if (code == 2 || code == 3) p.b |= 1ull << (q - 1);
    }
    return p;
  }

  friend bool operator==(const PauliString& p, const PauliString& q) {
    return p.n == q.n && p.a == q.a && p.b == q.b;
  }
  friend bool operator<(const PauliString& p, const PauliString& q) {
    if (p.n != q.n) return p.n < q.n;
    if (p.a != q.a) return p.a < q.a;
    return p.b < q.b;
  }
};

inline void require_same_n(const PauliString& p, const PauliString& q) {
  if (p.n != q.n) throw std::invalid_argument("Pauli operands have mismatched qubit counts");
}

// true iff PQ = QP; parity of the symplectic inner product a_P.b_Q + b_P.a_Q
inline bool commutes(const PauliString& p, const PauliString& q) {
  require_same_n(p, q);
  const int parity = (std::popcount(p.a & q.b) + std::popcount(p.b & q.a)) & 1;
  return parity == 0;
}

// sigma_P sigma_Q = phase * sigma_R with phase a fourth root of unity
inline std::pair<complex, PauliString> multiply(const PauliString& p, const PauliString& q) {
  require_same_n(p, q);
  PauliString r(p.n, p.a ^ q.a, p.b ^ q.b);
  // i-exponent: i^{a1 b1} i^{a2 b2} from the factors, (-1)^{b1 a2} from
  // commuting Z^{b1} past X^{a2}, and i^{-a3 b3} to restore the phase
  // convention on the product string
  int e = std::popcount(p.a & p.b) + std::popcount(q.a & q.b) +
          2 * std::popcount(p.b & q.a) - std::popcount(r.a & r.b);
  e = ((e % 4) + 4) % 4;
  static const complex roots[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {roots[e], r};
}

// Sparse real-coefficient Pauli sum H = sum_x mu_x P_x. Traceless by
// construction: identity terms are rejected, zero coefficients dropped.
class PauliHamiltonian {
public:
  PauliHamiltonian() = default;
  explicit PauliHamiltonian(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("PauliHamiltonian: bad qubit count");
  }

  int n() const { return n_; }
  std::size_t sparsity() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<PauliString, double>& terms() const { return terms_; }

  void set_term(const PauliString& p, double mu) {
    if (p.n != n_) throw std::invalid_argument("PauliHamiltonian: term qubit count mismatch");
    if (p.is_identity()) {
      if (mu != 0.0) throw std::invalid_argument("PauliHamiltonian: identity term not allowed");
      return;
    }
    if (mu == 0.0)
      terms_.erase(p);
    else
      terms_[p] = mu;
  }

  void add_term(const PauliString& p, double mu) { set_term(p, coeff(p) + mu); }

  double coeff(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? 0.0 : it->second;
  }

  double frobenius_norm_sq() const {
    double s = 0.0;
    for (const auto& [p, mu] : terms_) s += mu * mu;
    return s;
  }

  PauliHamiltonian scaled(double factor) const {
    PauliHamiltonian out(n_);
    for (const auto& [p, mu] : terms_) out.set_term(p, mu * factor);
    return out;
  }

  // sum of |mu_x|; upper-bounds the spectral norm
  double coeff_l1() const {
    double s = 0.0;
    for (const auto& [p, mu] : terms_) s += std::abs(mu);
    return s;
  }

  double max_abs_coeff() const {
    double s = 0.0;
    for (const auto& [p, mu] : terms_) s = std::max(s, std::abs(mu));
    return s;
  }

private:
  int n_ = 0;
  std::map<PauliString, double> terms_;
};

// normalized Frobenius norm sqrt(Tr[H^dag H]/2^n) = sqrt(sum mu_x^2)
inline double frobenius_norm(const PauliHamiltonian& h) {
  return std::sqrt(h.frobenius_norm_sq());
}

// (H - Hhat)/scale with exact-zero terms dropped
inline PauliHamiltonian residual(const PauliHamiltonian& h, const PauliHamiltonian& hhat,
                                 double scale) {
  if (h.n() != hhat.n()) throw std::invalid_argument("residual: qubit count mismatch");
  if (scale == 0.0) throw std::invalid_argument("residual: zero scale");
  PauliHamiltonian out(h.n());
  for (const auto& [p, mu] : h.terms()) out.set_term(p, mu / scale);
  for (const auto& [p, mu] : hhat.terms()) out.add_term(p, -mu / scale);
  return out;
}

// Uniform sample from K_{P_s}, the 2^{2n-1} Pauli strings commuting with
// P_s. Rejection from the uniform Pauli distribution; acceptance
// probability is exactly 1/2.
inline PauliString sample_commutant(const PauliString& ps, Rng& rng) {
  if (ps.is_identity()) throw std::invalid_argument("sample_commutant: identity has full commutant");
  const std::uint64_t mask = (1ull << ps.n) - 1;
  for (;;) {
    PauliString q(ps.n, rng.raw() & mask, rng.raw() & mask);
    if (commutes(q, ps)) return q;
  }
}

// Test-instance generator: exactly M distinct non-identity terms with
// coefficient magnitudes uniform in [lo, hi] and random signs.
inline PauliHamiltonian random_sparse_hamiltonian(int n, std::size_t m, double lo, double hi,
                                                  Rng& rng) {
  if (n < 1 || n > 16) throw std::invalid_argument("random_sparse_hamiltonian: bad n");
  const std::uint64_t candidates = (1ull << (2 * n)) - 1;  // 4^n - 1 non-identity strings
  if (m > candidates) throw std::invalid_argument("random_sparse_hamiltonian: M exceeds 4^n - 1");
  if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
    throw std::invalid_argument("random_sparse_hamiltonian: magnitude range must sit in [0, 1]");
  PauliHamiltonian h(n);
  std::set<PauliString> chosen;
  const std::uint64_t mask = (1ull << n) - 1;
  while (chosen.size() < m) {
    PauliString p(n, rng.raw() & mask, rng.raw() & mask);
    if (p.is_identity() || chosen.count(p)) continue;
    chosen.insert(p);
    double mu = rng.uniform(lo, hi);
    if (rng.bernoulli(0.5)) mu = -mu;
    if (mu == 0.0) mu = lo > 0 ? lo : hi;  // keep the term count exact
    h.set_term(p, mu);
  }
  return h;
}

}  // namespace hamlearn
