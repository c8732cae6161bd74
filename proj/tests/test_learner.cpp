#include <catch2/catch_amalgamated.hpp>

#include "hamlearn/learner.hpp"

using namespace hamlearn;

namespace {
PauliString P(const std::string& s) { return PauliString::parse(s); }

PauliHamiltonian single_term(const std::string& s, double mu) {
  PauliHamiltonian h(static_cast<int>(s.size()));
  h.set_term(P(s), mu);
  return h;
}
}

TEST_CASE("planning formulas") {
  CHECK(bucket_count(0.1) == 4);
  CHECK(bucket_count(0.5) == 1);
  CHECK(bucket_count(0.9) == 1);
  CHECK(interval_rounds(0.01) ==
        static_cast<int>(std::ceil(std::log(2.0 * M_PI / 0.01) / std::log(1.5))));
  CHECK(interval_rounds(0.01) > interval_rounds(0.1));

  LearnerConfig cfg;
  cfg.sparsity = 3;
  cfg.delta = 0.1;
  CHECK(structure_shot_count(cfg) ==
        static_cast<long long>(std::ceil(8.0 * 9.0 * std::log(30.0))));
}

TEST_CASE("structure circuit layout") {
  const DressedCircuit c = structure_circuit(single_term("Z", 0.5), 0.8, 16);
  CHECK(c.reps == 16);
  REQUIRE(c.segments.size() == 2);
  CHECK(c.segments[0].unknown);
  CHECK(c.segments[0].t == Catch::Approx(0.05));
  CHECK_FALSE(c.segments[1].unknown);
  CHECK(c.unknown_time_total() == Catch::Approx(0.8));

  const DressedCircuit bare = structure_circuit(PauliHamiltonian(1), 0.8, 16);
  CHECK(bare.segments.size() == 1);
}

TEST_CASE("structure learning finds the support of a boosted residual") {
  PauliHamiltonian h(3);
  h.set_term(P("XIZ"), 0.8);
  h.set_term(P("ZZI"), -0.7);
  EvolutionOracle oracle(h, 41);

  LearnerConfig cfg;
  cfg.sparsity = 2;
  cfg.eps = 0.1;
  cfg.delta = 0.05;

  std::set<PauliString> found;
  for (int j = 0; j < bucket_count(cfg.eps); ++j) {
    const auto batch = structure_learn(oracle, PauliHamiltonian(3), j, cfg);
    found.insert(batch.begin(), batch.end());
    for (const PauliString& p : batch) CHECK(h.terms().count(p) == 1);  // no false positives
  }
  CHECK(found.count(P("XIZ")) == 1);
  CHECK(found.count(P("ZZI")) == 1);
}

TEST_CASE("count_nonidentity_rate matches the exact circuit distribution") {
  PauliHamiltonian h(2);
  h.set_term(P("XZ"), 0.6);
  EvolutionOracle oracle(h, 43);
  LearnerConfig cfg;
  cfg.sparsity = 1;
  cfg.eps = 0.25;
  cfg.delta = 0.1;

  const NonIdentityStats stats = count_nonidentity_rate(oracle, PauliHamiltonian(2), 0, cfg, 20);
  REQUIRE(stats.counts.size() == 20);
  const double p = stats.exact_nonidentity_prob;
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  double mean = 0.0;
  for (long long c : stats.counts) mean += static_cast<double>(c);
  mean /= 20.0;
  const double expect = static_cast<double>(stats.shots_per_trial) * p;
  const double sigma = std::sqrt(static_cast<double>(stats.shots_per_trial) * p * (1.0 - p) / 20.0);
  CHECK(std::abs(mean - expect) < 4.0 * sigma);
}

TEST_CASE("coefficient learning in exact-expectation mode") {
  LearnerConfig cfg;
  cfg.sparsity = 1;
  cfg.eps = 0.01;
  cfg.delta = 0.1;
  cfg.exact_expectation = true;

  for (double mu : {0.93, 0.4, 0.07, -0.55, -0.02}) {
    EvolutionOracle oracle(single_term("Z", mu), 47);
    const CoefficientResult res = coefficient_learn(oracle, P("Z"), cfg);
    CHECK(std::abs(res.mu_hat - mu) <= cfg.eps);
    for (const CoefficientInterval& iv : res.history) {
      CHECK(mu >= iv.a - 1e-12);  // invariant: the target never leaves [a, b]
      CHECK(mu <= iv.b + 1e-12);
    }
    // each round shrinks the width by exactly 2/3
    double w = 2.0 * M_PI;
    for (const CoefficientInterval& iv : res.history) {
      CHECK(iv.width() == Catch::Approx(w * 2.0 / 3.0).margin(1e-12));
      w = iv.width();
    }
  }
}

TEST_CASE("coefficient learning with sampled measurements") {
  LearnerConfig cfg;
  cfg.sparsity = 1;
  cfg.eps = 0.05;
  cfg.delta = 0.1;

  const double mu = 0.62;
  int successes = 0;
  for (int trial = 0; trial < 20; ++trial) {
    EvolutionOracle oracle(single_term("XY", mu), 500 + trial);
    const CoefficientResult res = coefficient_learn(oracle, P("XY"), cfg);
    if (std::abs(res.mu_hat - mu) <= cfg.eps) ++successes;
  }
  CHECK(successes >= 17);  // failure budget delta = 0.1 per trial
}

TEST_CASE("twirling isolates one term of a multi-term Hamiltonian") {
  PauliHamiltonian h(2);
  h.set_term(P("ZI"), 0.45);
  h.set_term(P("XX"), 0.3);
  h.set_term(P("YZ"), -0.2);

  LearnerConfig cfg;
  cfg.sparsity = 3;
  cfg.eps = 0.02;
  cfg.delta = 0.1;
  cfg.exact_expectation = true;

  for (const auto& [name, mu] : std::vector<std::pair<std::string, double>>{
           {"ZI", 0.45}, {"XX", 0.3}, {"YZ", -0.2}}) {
    EvolutionOracle oracle(h, 53);
    const CoefficientResult res = coefficient_learn(oracle, P(name), cfg);
    CHECK(std::abs(res.mu_hat - mu) <= cfg.eps);
  }
}

TEST_CASE("trajectory mode agrees with the averaged channel") {
  // single-term dynamics: every twirl commutes, so trajectory sampling
  // only adds shot noise on top of the same signal
  LearnerConfig cfg;
  cfg.sparsity = 1;
  cfg.eps = 0.2;
  cfg.delta = 0.1;
  cfg.trajectory_mode = true;

  const double mu = 0.5;
  int successes = 0;
  for (int trial = 0; trial < 10; ++trial) {
    EvolutionOracle oracle(single_term("Z", mu), 700 + trial);
    const CoefficientResult res = coefficient_learn(oracle, P("Z"), cfg);
    if (std::abs(res.mu_hat - mu) <= cfg.eps) ++successes;
  }
  CHECK(successes >= 8);
}

TEST_CASE("hierarchical learner recovers a sparse Hamiltonian") {
  PauliHamiltonian h(3);
  h.set_term(P("XIZ"), 0.85);
  h.set_term(P("ZZI"), -0.4);
  h.set_term(P("IYX"), 0.15);

  LearnerConfig cfg;
  cfg.sparsity = 3;
  cfg.eps = 0.05;
  cfg.delta = 0.1;

  EvolutionOracle oracle(h, 61);
  const LearnedHamiltonian learned = hierarchical_learn(oracle, cfg);

  // exact support recovery
  CHECK(learned.estimate.sparsity() == 3);
  for (const auto& [p, mu] : h.terms()) {
    CHECK(std::abs(learned.estimate.coeff(p) - mu) <= cfg.eps);
    CHECK(learned.provenance.count(p) == 1);
  }

  // the ledger saw both phases of at least one bucket
  bool saw_ai = false, saw_aii = false;
  for (const auto& [phase, time] : learned.ledger.phase_time()) {
    if (phase.rfind("AI:", 0) == 0) saw_ai = true;
    if (phase.rfind("AII:", 0) == 0) saw_aii = true;
    CHECK(time > 0.0);
  }
  CHECK(saw_ai);
  CHECK(saw_aii);
}

TEST_CASE("hierarchical learner on the zero Hamiltonian returns nothing") {
  LearnerConfig cfg;
  cfg.sparsity = 2;
  cfg.eps = 0.1;
  cfg.delta = 0.1;
  EvolutionOracle oracle(PauliHamiltonian(3), 67);
  const LearnedHamiltonian learned = hierarchical_learn(oracle, cfg);
  CHECK(learned.estimate.empty());
  CHECK(learned.ledger.total_time() > 0.0);  // the search itself still costs time
}

TEST_CASE("hierarchical learner is seed-deterministic") {
  PauliHamiltonian h(3);
  h.set_term(P("XYI"), 0.7);
  h.set_term(P("IZZ"), -0.3);
  LearnerConfig cfg;
  cfg.sparsity = 2;
  cfg.eps = 0.1;
  cfg.delta = 0.1;

  EvolutionOracle a(h, 71), b(h, 71);
  const LearnedHamiltonian la = hierarchical_learn(a, cfg);
  const LearnedHamiltonian lb = hierarchical_learn(b, cfg);
  CHECK(la.estimate.terms() == lb.estimate.terms());
  CHECK(la.ledger.total_time() == lb.ledger.total_time());
}
