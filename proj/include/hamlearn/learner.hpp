#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hamlearn/oracle.hpp"

namespace hamlearn {

// Every O(.) constant in the structure/coefficient learners, pinned and
// overridable.
struct LearnerConfig {
  std::size_t sparsity = 1;  // M
  double eps = 0.1;          // target l_inf accuracy
  double delta = 0.1;        // failure budget
  double c_tau = 0.25;       // A^I evolution time: tau = c_tau 2^j / M
  double c_r = 4.0;          // A^I Trotter steps: r1 = ceil(c_r 4^j M^2)
  double c_m = 8.0;          // A^I shots: ceil(c_m M^2 ln(M/delta))
  double c2 = 16.0;          // A^II Trotter steps: r2 = ceil(c2 M^2 tau^2)
  double n_exp_mult = 32.0;  // shots per observable per round multiplier
  bool exact_expectation = false;  // noiseless <O+/-> instead of sampled
  bool trajectory_mode = false;    // per-shot sampled twirls (slow; for tests)
};

inline int bucket_count(double eps) {
  return std::max(1, static_cast<int>(std::ceil(std::log2(1.0 / eps))));
}

inline int interval_rounds(double eps) {
  return std::max(1, static_cast<int>(std::ceil(std::log(2.0 * M_PI / eps) / std::log(1.5))));
}

inline long long structure_shot_count(const LearnerConfig& cfg) {
  const double m = static_cast<double>(cfg.sparsity);
  return static_cast<long long>(std::ceil(cfg.c_m * m * m * std::log(std::max(2.0, m / cfg.delta))));
}

inline DressedCircuit structure_circuit(const PauliHamiltonian& hhat, double tau, std::uint64_t r1) {
  DressedCircuit c;
  c.reps = r1;
  c.segments.push_back(DressedCircuit::unknown_evolution(tau / static_cast<double>(r1)));
  if (!hhat.empty())  // known factor e^{+i Hhat tau/r1}
    c.segments.push_back(DressedCircuit::known_evolution(hhat, -tau / static_cast<double>(r1)));
  return c;
}

// A^I: Bell-sample the residual circuit for bucket j and report every
// non-identity string observed.
inline std::set<PauliString> structure_learn(EvolutionOracle& oracle, const PauliHamiltonian& hhat,
                                             int j, const LearnerConfig& cfg,
                                             const std::string& phase = "AI") {
  const double m = static_cast<double>(cfg.sparsity);
  const double tau = cfg.c_tau * std::pow(2.0, j) / m;
  const auto r1 = static_cast<std::uint64_t>(std::ceil(cfg.c_r * std::pow(4.0, j) * m * m));
  oracle.set_phase(phase);
  auto sampler = oracle.make_sampler(structure_circuit(hhat, tau, r1));
  std::set<PauliString> found;
  const long long shots = structure_shot_count(cfg);
  for (long long i = 0; i < shots; ++i) {
    PauliString p = sampler.sample();
    if (!p.is_identity()) found.insert(p);
  }
  return found;
}

// Empirical statistics for the non-identity sampling rate of one A^I
// round, next to the exact rate from the dense distribution.
struct NonIdentityStats {
  double exact_nonidentity_prob = 0.0;
  long long shots_per_trial = 0;
  std::vector<long long> counts;  // one entry per trial
};

inline NonIdentityStats count_nonidentity_rate(EvolutionOracle& oracle, const PauliHamiltonian& hhat,
                                               int j, const LearnerConfig& cfg, int trials) {
  const double m = static_cast<double>(cfg.sparsity);
  const double tau = cfg.c_tau * std::pow(2.0, j) / m;
  const auto r1 = static_cast<std::uint64_t>(std::ceil(cfg.c_r * std::pow(4.0, j) * m * m));
  const DressedCircuit circuit = structure_circuit(hhat, tau, r1);
  NonIdentityStats stats;
  stats.exact_nonidentity_prob = 1.0 - oracle.exact_bell_distribution(circuit)[0];
  stats.shots_per_trial = structure_shot_count(cfg);
  oracle.set_phase("AI");
  for (int trial = 0; trial < trials; ++trial) {
    auto sampler = oracle.make_sampler(circuit);
    long long count = 0;
    for (long long i = 0; i < stats.shots_per_trial; ++i)
      if (!sampler.sample().is_identity()) ++count;
    stats.counts.push_back(count);
  }
  return stats;
}

// The target coefficient stays inside [a, b]; each accepted round
// shrinks the width by exactly 2/3.
struct CoefficientInterval {
  double a = -M_PI;
  double b = M_PI;
  double width() const { return b - a; }
  double midpoint() const { return 0.5 * (a + b); }
};

struct CoefficientResult {
  double mu_hat = 0.0;
  int rounds = 0;
  std::vector<CoefficientInterval> history;  // interval after each round
};

// Sign of the measured phase arc: S = <O+> + i<O-> = e^{+i 2 mu tau} for
// exact single-term dynamics under the O+/- construction used here.
// Verified by the closed-form calibration test; a flipped sign would
// corrupt every bisection step.
inline constexpr int kPhaseSign = +1;

// A^II: robust frequency estimation of mu_s through interval bisection
// on the reshaped (commutant-twirled) dynamics.
inline CoefficientResult coefficient_learn(EvolutionOracle& oracle, const PauliString& ps,
                                           const LearnerConfig& cfg,
                                           const std::string& phase = "AII") {
  const double m = static_cast<double>(cfg.sparsity);
  const int rounds = interval_rounds(cfg.eps);
  const int buckets = bucket_count(cfg.eps);
  const auto n_exp = static_cast<long long>(std::ceil(
      cfg.n_exp_mult * std::log(4.0 * rounds * std::max<std::size_t>(1, cfg.sparsity) * buckets / cfg.delta)));
  const PMObservables obs = build_pm_observables(ps);
  oracle.set_phase(phase);

  CoefficientResult result;
  CoefficientInterval iv;
  for (int round = 0; round < rounds; ++round) {
    const double w = iv.width();
    const double tau = M_PI / (2.0 * w);
    const auto r2 = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(cfg.c2 * m * m * tau * tau)));

    complex s_hat;
    if (cfg.trajectory_mode) {
      // explicit per-shot trajectories with fresh uniform twirls
      auto run_shots = [&](const Matrix& observable, long long shots) {
        long long sum = 0;
        for (long long shot = 0; shot < shots; ++shot) {
          DressedCircuit c;
          for (std::uint64_t i = 0; i < r2; ++i) {
            const Matrix q = pauli_dense(sample_commutant(ps, oracle.rng()));
            c.segments.push_back(DressedCircuit::known_unitary(q));
            c.segments.push_back(DressedCircuit::unknown_evolution(tau / static_cast<double>(r2)));
            c.segments.push_back(DressedCircuit::known_unitary(q));
          }
          const Vector state = oracle.evolve_state(c, obs.initial_state);
          sum += measure_pm_observable(state, observable, oracle.rng(), 1)[0];
        }
        return static_cast<double>(sum) / static_cast<double>(shots);
      };
      s_hat = complex(run_shots(obs.plus, n_exp), run_shots(obs.minus, n_exp));
    } else {
      s_hat = oracle.measure_reshaped(obs, tau, r2, n_exp, n_exp, cfg.exact_expectation);
    }

    // unwrap arg(S) into the width-pi arc determined by [a, b]
    const double theta = std::arg(s_hat);
    const double theta_a = kPhaseSign * iv.a * M_PI / w;
    double d = kPhaseSign * (theta - theta_a);
    d = std::fmod(d, 2.0 * M_PI);
    if (d < -M_PI_2) d += 2.0 * M_PI;
    if (d >= 1.5 * M_PI) d -= 2.0 * M_PI;
    d = std::clamp(d, 0.0, M_PI);
    const double mu_tilde = iv.a + d * w / M_PI;

    if (mu_tilde <= iv.midpoint())
      iv.b = (iv.a + 2.0 * iv.b) / 3.0;
    else
      iv.a = (2.0 * iv.a + iv.b) / 3.0;
    result.history.push_back(iv);
  }
  result.rounds = rounds;
  result.mu_hat = iv.midpoint();
  return result;
}

struct TermProvenance {
  int bucket = 0;  // bucket index at detection (last re-learn)
  int rounds = 0;
};

struct LearnedHamiltonian {
  PauliHamiltonian estimate;
  std::map<PauliString, TermProvenance> provenance;
  TimeLedger ledger;
};

// Algorithm: for each bucket, learn the support of the boosted residual,
// then the coefficient of every detected term against the original
// dynamics. Terms re-detected later are re-learned and overwritten.
inline LearnedHamiltonian hierarchical_learn(EvolutionOracle& oracle, const LearnerConfig& cfg) {
  LearnedHamiltonian out;
  out.estimate = PauliHamiltonian(oracle.n());
  const int buckets = bucket_count(cfg.eps);
  for (int j = 0; j < buckets; ++j) {
    const std::set<PauliString> candidates =
        structure_learn(oracle, out.estimate, j, cfg, "AI:" + std::to_string(j));
    for (const PauliString& s : candidates) {
      const CoefficientResult res = coefficient_learn(oracle, s, cfg, "AII:" + std::to_string(j));
      out.estimate.set_term(s, res.mu_hat);
      out.provenance[s] = {j, res.rounds};
    }
  }
  // spurious-support guard: strings outside the true support estimate to
  // ~0 and would otherwise pollute the recovered support
  std::vector<PauliString> prune;
  for (const auto& [p, mu] : out.estimate.terms())
    if (std::abs(mu) < cfg.eps / 2.0) prune.push_back(p);
  for (const PauliString& p : prune) {
    out.estimate.set_term(p, 0.0);
    out.provenance.erase(p);
  }
  out.ledger = oracle.ledger();
  return out;
}

}  // namespace hamlearn
