#pragma once

#include <functional>
#include <string>

#include "hamlearn/bounds.hpp"
#include "hamlearn/oracle.hpp"

namespace hamlearn {

enum class Emptiness { EMPTY, NOT_EMPTY };

struct EmptinessVerdict {
  Emptiness verdict = Emptiness::EMPTY;
  long long shots_planned = 0;
  long long shots_used = 0;
  long long nonidentity_count = 0;
  double t = 0.0;
  double threshold = 0.0;  // tolerant mode only: p_half
  TolerantPlan tolerant;   // populated in tolerant mode
  IntolerantPlan intolerant;  // populated in intolerant mode
  TimeLedger ledger;
};

using CircuitBuilder = std::function<DressedCircuit(double t)>;

inline CircuitBuilder bare_circuit_builder() {
  return [](double t) { return DressedCircuit::bare(t); };
}

// Promise: H = 0 or ||H||_F >= eps, with ||H||_2 <= L. Early exit on the
// first non-identity Bell sample.
inline EmptinessVerdict test_intolerant(EvolutionOracle& oracle, double spectral_bound, double eps,
                                        double delta) {
  const IntolerantPlan plan = intolerant_plan(spectral_bound, eps, delta);
  oracle.set_phase("intolerant");
  EmptinessVerdict v;
  v.intolerant = plan;
  v.t = plan.t;
  v.shots_planned = plan.shots;
  auto sampler = oracle.make_sampler(DressedCircuit::bare(plan.t));
  for (long long i = 0; i < plan.shots; ++i) {
    ++v.shots_used;
    if (!sampler.sample().is_identity()) {
      v.nonidentity_count = 1;
      v.verdict = Emptiness::NOT_EMPTY;
      v.ledger = oracle.ledger();
      return v;
    }
  }
  v.verdict = Emptiness::EMPTY;
  v.ledger = oracle.ledger();
  return v;
}

// Promise: the effective generator has ||.||_F <= eps1 or >= eps2, with
// spectral bound L. Always draws the full planned shot count so the
// decision statistic is exactly the Chernoff-Hoeffding one.
inline EmptinessVerdict test_tolerant(EvolutionOracle& oracle, const CircuitBuilder& builder,
                                      double spectral_bound, double eps1, double eps2,
                                      double delta) {
  const TolerantPlan plan = tolerant_plan(spectral_bound, eps1, eps2, delta);
  oracle.set_phase("tolerant");
  EmptinessVerdict v;
  v.tolerant = plan;
  v.t = plan.t;
  v.threshold = plan.p_half;
  v.shots_planned = plan.shots;
  auto sampler = oracle.make_sampler(builder(plan.t));
  for (long long i = 0; i < plan.shots; ++i) {
    ++v.shots_used;
    if (!sampler.sample().is_identity()) ++v.nonidentity_count;
  }
  const double rate = static_cast<double>(v.nonidentity_count) / static_cast<double>(plan.shots);
  v.verdict = rate >= plan.p_half ? Emptiness::NOT_EMPTY : Emptiness::EMPTY;
  v.ledger = oracle.ledger();
  return v;
}

inline EmptinessVerdict test_tolerant(EvolutionOracle& oracle, double spectral_bound, double eps1,
                                      double eps2, double delta) {
  return test_tolerant(oracle, bare_circuit_builder(), spectral_bound, eps1, eps2, delta);
}

}  // namespace hamlearn
