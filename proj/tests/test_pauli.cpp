#include <catch2/catch_amalgamated.hpp>

#include "hamlearn/pauli.hpp"
#include "hamlearn/dense.hpp"
#include "test_helpers.hpp"

using namespace hamlearn;

namespace {
PauliString P(const std::string& s) { return PauliString::parse(s); }
}

TEST_CASE("commutes matches the textbook single-qubit cases") {
  CHECK(commutes(P("X"), P("X")));
  CHECK_FALSE(commutes(P("X"), P("Z")));
  CHECK(commutes(P("XZ"), P("ZX")));  // both anticommutations cancel
  CHECK_THROWS_AS(commutes(P("X"), P("XX")), std::invalid_argument);
}

TEST_CASE("symplectic commutation agrees with dense commutators, exhaustive n <= 2") {
  for (int n = 1; n <= 2; ++n) {
    const std::uint64_t count = 1ull << (2 * n);
    for (std::uint64_t i = 0; i < count; ++i)
      for (std::uint64_t j = 0; j < count; ++j) {
        const PauliString p = PauliString::from_index(n, i);
        const PauliString q = PauliString::from_index(n, j);
        CHECK(commutes(p, q) == oracle_ref::dense_commutes(p, q));
      }
  }
}

TEST_CASE("multiply basic identities") {
  auto [phase_xz, r_xz] = multiply(P("X"), P("Z"));
  CHECK(phase_xz == complex(0, -1));
  CHECK(r_xz == P("Y"));

  auto [phase_iq, r_iq] = multiply(P("II"), P("XZ"));
  CHECK(phase_iq == complex(1, 0));
  CHECK(r_iq == P("XZ"));

  auto [phase_pp, r_pp] = multiply(P("YZ"), P("YZ"));
  CHECK(phase_pp == complex(1, 0));
  CHECK(r_pp.is_identity());
}

TEST_CASE("multiply is phase-consistent with dense products, exhaustive n <= 2") {
  for (int n = 1; n <= 2; ++n) {
    const std::uint64_t count = 1ull << (2 * n);
    for (std::uint64_t i = 0; i < count; ++i)
      for (std::uint64_t j = 0; j < count; ++j) {
        const PauliString p = PauliString::from_index(n, i);
        const PauliString q = PauliString::from_index(n, j);
        auto [phase, r] = multiply(p, q);
        const Matrix lhs = pauli_dense(p) * pauli_dense(q);
        const Matrix rhs = phase * pauli_dense(r);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
      }
  }
}

TEST_CASE("every encoded Pauli is Hermitian and unitary") {
  for (std::uint64_t i = 0; i < 64; ++i) {
    const Matrix m = pauli_dense(PauliString::from_index(3, i));
    CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((m * m - Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("frobenius norm") {
  PauliHamiltonian zero(2);
  CHECK(frobenius_norm(zero) == 0.0);

  PauliHamiltonian h(2);
  h.set_term(P("XI"), 0.6);
  h.set_term(P("ZZ"), 0.8);
  CHECK(frobenius_norm(h) == Catch::Approx(1.0).margin(1e-15));

  // random 5-term Hamiltonian vs the dense trace
  Rng rng(17);
  const PauliHamiltonian hr = random_sparse_hamiltonian(3, 5, 0.2, 1.0, rng);
  const Matrix dense = to_dense(hr).m;
  const double from_trace = std::sqrt(std::real((dense.adjoint() * dense).trace()) / 8.0);
  CHECK(std::abs(from_trace - frobenius_norm(hr)) < 1e-12);
}

TEST_CASE("spectral norm") {
  PauliHamiltonian h(1);
  h.set_term(P("Z"), -0.7);
  CHECK(spectral_norm(h) == Catch::Approx(0.7).margin(1e-12));

  PauliHamiltonian xz(1);
  xz.set_term(P("X"), 1.0);
  xz.set_term(P("Z"), 1.0);
  CHECK(spectral_norm(xz) == Catch::Approx(std::sqrt(2.0)).margin(1e-12));

  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const PauliHamiltonian hr = random_sparse_hamiltonian(3, 4, 0.1, 1.0, rng);
    CHECK(spectral_norm(hr) <= hr.coeff_l1() + 1e-12);
  }
}

TEST_CASE("residual") {
  Rng rng(5);
  const PauliHamiltonian h = random_sparse_hamiltonian(3, 4, 0.1, 1.0, rng);
  CHECK(residual(h, h, 0.5).empty());
  CHECK(residual(h, PauliHamiltonian(3), 1.0).terms() == h.terms());
  CHECK_THROWS_AS(residual(h, h, 0.0), std::invalid_argument);

  PauliHamiltonian a(1), b(1);
  a.set_term(P("Z"), 0.9);
  b.set_term(P("Z"), 0.5);
  const PauliHamiltonian r = residual(a, b, 0.25);  // 2^{-j} with j = 2
  CHECK(r.coeff(P("Z")) == Catch::Approx(1.6).margin(1e-15));

  // triangle inequality
  Rng rng2(6);
  for (int i = 0; i < 20; ++i) {
    const PauliHamiltonian x = random_sparse_hamiltonian(3, 5, 0.1, 1.0, rng2);
    const PauliHamiltonian y = random_sparse_hamiltonian(3, 5, 0.1, 1.0, rng2);
    CHECK(frobenius_norm(residual(x, y, 1.0)) <= frobenius_norm(x) + frobenius_norm(y) + 1e-12);
  }
}

TEST_CASE("commutant size is 2^{2n-1} for every non-identity string, n <= 3") {
  for (int n = 1; n <= 3; ++n) {
    const std::uint64_t count = 1ull << (2 * n);
    for (std::uint64_t i = 1; i < count; ++i) {
      const PauliString p = PauliString::from_index(n, i);
      CHECK(enumerate_commutant(p).size() == (1ull << (2 * n - 1)));
    }
  }
}

TEST_CASE("sample_commutant draws uniformly from the commutant") {
  Rng rng(11);

  SECTION("outputs always commute") {
    const PauliString ps = P("XZY");
    for (int i = 0; i < 200; ++i) CHECK(commutes(sample_commutant(ps, rng), ps));
  }

  SECTION("n=1, P_s = Z: frequencies 1/2 within 3 sigma") {
    const PauliString ps = P("Z");
    const int draws = 10000;
    int identity = 0;
    for (int i = 0; i < draws; ++i)
      if (sample_commutant(ps, rng).is_identity()) ++identity;
    const double sigma = std::sqrt(0.25 * draws);
    CHECK(std::abs(identity - draws / 2.0) < 3.0 * sigma);
  }

  SECTION("n=2, P_s = XZ: uniform over the 8 commutant elements within 3 sigma") {
    const PauliString ps = P("XZ");
    const auto commutant = enumerate_commutant(ps);
    REQUIRE(commutant.size() == 8);
    std::map<PauliString, int> counts;
    const int draws = 16000;
    for (int i = 0; i < draws; ++i) ++counts[sample_commutant(ps, rng)];
    const double expect = draws / 8.0;
    const double sigma = std::sqrt(draws * (1.0 / 8.0) * (7.0 / 8.0));
    for (const PauliString& q : commutant) CHECK(std::abs(counts[q] - expect) < 3.0 * sigma);
  }
}

TEST_CASE("random sparse Hamiltonian generator") {
  Rng rng(42);
  const PauliHamiltonian h1 = random_sparse_hamiltonian(1, 3, 0.5, 1.0, rng);
  CHECK(h1.sparsity() == 3);
  for (const auto& [p, mu] : h1.terms()) {
    CHECK_FALSE(p.is_identity());
    CHECK(std::abs(mu) >= 0.5);
    CHECK(std::abs(mu) <= 1.0);
  }

  CHECK_THROWS_AS(random_sparse_hamiltonian(1, 4, 0.5, 1.0, rng), std::invalid_argument);

  Rng a(7), b(7);
  const PauliHamiltonian ha = random_sparse_hamiltonian(4, 6, 0.1, 1.0, a);
  const PauliHamiltonian hb = random_sparse_hamiltonian(4, 6, 0.1, 1.0, b);
  CHECK(ha.terms() == hb.terms());
}

TEST_CASE("Pauli text round trip") {
  const PauliString p = P("IXYZ");
  CHECK(p.str() == "IXYZ");
  CHECK(p.first_support() == 2);
  CHECK(PauliString::from_index(4, p.index()) == p);
  CHECK_THROWS_AS(P("ABCD"), std::invalid_argument);
}

TEST_CASE("PauliHamiltonian rejects identity terms") {
  PauliHamiltonian h(2);
  CHECK_THROWS_AS(h.set_term(PauliString::identity(2), 0.5), std::invalid_argument);
}
