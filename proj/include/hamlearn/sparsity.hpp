#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hamlearn/emptiness.hpp"
#include "hamlearn/learner.hpp"

namespace hamlearn {

// additive Trotter error bound T^2 ||Hhat||_F ||H||_2 / r for r steps of
// total time T
inline double trotter_error_bound(double total_time, std::uint64_t r, double hhat_frob,
                                  double spectral_bound) {
  if (r < 1) throw std::invalid_argument("trotter_error_bound: r >= 1 required");
  return total_time * total_time * hhat_frob * spectral_bound / static_cast<double>(r);
}

// || (e^{+i Hhat t} e^{-i H t})^r - e^{-i (H - Hhat) r t} ||_F, the exact
// quantity the bound above controls (Bell-state picture collapses it to
// a Frobenius norm of the operator difference)
inline double trotter_error_exact(const PauliHamiltonian& h, const PauliHamiltonian& hhat,
                                  double t, std::uint64_t r) {
  if (h.n() != hhat.n()) throw std::invalid_argument("trotter_error_exact: qubit count mismatch");
  require_dense(h.n(), "trotter_error_exact");
  const Matrix step = evolve(hhat, -t).m * evolve(h, t).m;
  const Matrix trotterized = matrix_power(step, r);
  const Matrix ideal = evolve(residual(h, hhat, 1.0), static_cast<double>(r) * t).m;
  return std::sqrt((trotterized - ideal).squaredNorm() / static_cast<double>(1L << h.n()));
}

// Acceptance-style far instance: M+1 terms of equal magnitude
// max(eps, magnitude), so dropping any one of them costs at least eps in
// Frobenius distance to every M-sparse Hamiltonian.
inline PauliHamiltonian eps_far_instance(int n, std::size_t m, double eps, Rng& rng,
                                         double magnitude = 0.0) {
  const double mag = std::max(eps, magnitude);
  PauliHamiltonian shape = random_sparse_hamiltonian(n, m + 1, mag, mag, rng);
  PauliHamiltonian out(n);
  for (const auto& [p, mu] : shape.terms()) out.set_term(p, mu < 0 ? -mag : mag);
  return out;
}

enum class Sparsity { M_SPARSE, NOT_M_SPARSE };

struct SparsityVerdict {
  Sparsity verdict = Sparsity::M_SPARSE;
  PauliHamiltonian learned;           // M-sparse estimate, rescaled by L
  EmptinessVerdict emptiness;         // sub-verdict on H - Hhat
  double eps1_prime = 0.0, eps2_prime = 0.0;
  double t = 0.0;                     // per-shot evolution time in the test phase
  std::uint64_t trotter_steps = 0;    // r
  double learning_time = 0.0, testing_time = 0.0;
  TimeLedger ledger;
};

inline double sparsity_eps2_prime(double eps) {
  return eps * std::sqrt(57.0 - 8.0 * std::sqrt(10.0)) / 8.0;
}

// Learn-then-verify M-sparsity test: learn an M-sparse Hhat, then run the
// tolerant emptiness tester on H - Hhat through a Trotterized circuit.
inline SparsityVerdict test_sparsity(EvolutionOracle& oracle, std::size_t m, double eps,
                                     double spectral_bound, double delta,
                                     LearnerConfig config = {}) {
  if (!(eps > 0.0 && spectral_bound > 0.0 && delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("test_sparsity: bad parameters");
  const double L = spectral_bound;
  const double sqrt_m = std::sqrt(static_cast<double>(m));

  SparsityVerdict v;
  v.eps1_prime = 5.0 * eps / 8.0;
  v.eps2_prime = sparsity_eps2_prime(eps);

  // learning phase on the 1/L-rescaled dynamics, failure budget delta/2
  config.sparsity = std::max<std::size_t>(1, m);
  config.eps = eps / (2.0 * L * sqrt_m);
  config.delta = delta / 2.0;
  EvolutionOracle rescaled = oracle.rescaled(1.0 / L);
  const LearnedHamiltonian learned = hierarchical_learn(rescaled, config);
  v.learning_time = oracle.ledger().total_time();

  // keep the M largest-magnitude terms; the guarantee needs Hhat M-sparse
  std::vector<std::pair<double, PauliString>> ranked;
  for (const auto& [p, mu] : learned.estimate.terms()) ranked.push_back({std::abs(mu), p});
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    return x.first != y.first ? x.first > y.first : x.second < y.second;
  });
  PauliHamiltonian hhat(oracle.n());
  for (std::size_t i = 0; i < ranked.size() && i < m; ++i)
    hhat.set_term(ranked[i].second, learned.estimate.coeff(ranked[i].second) * L);
  v.learned = hhat;

  // testing phase: U2(t) = (e^{+i Hhat t/r} U_H(t/r))^r against thresholds
  // (eps1', eps2') with spectral bound L(M+1)
  auto builder = [&](double t) {
    const auto r = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(8.0 * t * L * L * sqrt_m / eps)));
    v.t = t;
    v.trotter_steps = r;
    DressedCircuit c;
    c.reps = r;
    c.segments.push_back(DressedCircuit::unknown_evolution(t / static_cast<double>(r)));
    if (!hhat.empty())
      c.segments.push_back(DressedCircuit::known_evolution(hhat, -t / static_cast<double>(r)));
    return c;
  };
  v.emptiness = test_tolerant(oracle, builder, L * (static_cast<double>(m) + 1.0), v.eps1_prime,
                              v.eps2_prime, delta / 2.0);
  v.verdict = v.emptiness.verdict == Emptiness::EMPTY ? Sparsity::M_SPARSE : Sparsity::NOT_M_SPARSE;
  v.ledger = oracle.ledger();
  v.testing_time = v.ledger.total_time() - v.learning_time;
  return v;
}

}  // namespace hamlearn
