#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hamlearn/dense.hpp"
#include "hamlearn/pauli.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

// Accumulates the physical cost of every query to the unknown dynamics.
// Known unitaries are never charged.
class TimeLedger {
public:
  void charge(const std::string& phase, double time, long long queries) {
    phase_time_[phase] += time;
    phase_queries_[phase] += queries;
    total_time_ += time;
    total_queries_ += queries;
  }

  void merge(const TimeLedger& other) {
    for (const auto& [k, v] : other.phase_time_) phase_time_[k] += v;
    for (const auto& [k, v] : other.phase_queries_) phase_queries_[k] += v;
    total_time_ += other.total_time_;
    total_queries_ += other.total_queries_;
  }

  double total_time() const { return total_time_; }
  long long total_queries() const { return total_queries_; }
  const std::map<std::string, double>& phase_time() const { return phase_time_; }
  const std::map<std::string, long long>& phase_queries() const { return phase_queries_; }

private:
  std::map<std::string, double> phase_time_;
  std::map<std::string, long long> phase_queries_;
  double total_time_ = 0.0;
  long long total_queries_ = 0;
};

// Interleaved product of unknown-Hamiltonian evolution segments and
// known unitaries, repeated `reps` times. Segments are listed in
// application order (first entry hits the state first).
struct DressedCircuit {
  struct Segment {
    bool unknown = false;
    double t = 0.0;  // duration, unknown segments only
    Matrix u;        // known segments only
  };

  std::vector<Segment> segments;
  std::uint64_t reps = 1;

  static DressedCircuit bare(double t) {
    DressedCircuit c;
    c.segments.push_back({true, t, {}});
    return c;
  }

  static Segment unknown_evolution(double t) { return {true, t, {}}; }
  static Segment known_unitary(Matrix u) { return {false, 0.0, std::move(u)}; }
  // known factor e^{-i H_known t}
  static Segment known_evolution(const PauliHamiltonian& h, double t) {
    return {false, 0.0, evolve(h, t).m};
  }

  double unknown_time_per_rep() const {
    double s = 0.0;
    for (const auto& seg : segments)
      if (seg.unknown) s += std::abs(seg.t);
    return s;
  }

  double unknown_time_total() const { return static_cast<double>(reps) * unknown_time_per_rep(); }
};

// +/-1 observable pair O_s^+/- for robust frequency estimation on P_s,
// together with the matching initial state (|1,beta> + |-1,beta>)/sqrt(2).
// The flipped qubit s* is the first one P_s acts on non-trivially.
struct PMObservables {
  PauliString ps;
  int sstar = 0;
  Matrix plus, minus;
  Vector initial_state;
};

inline PMObservables build_pm_observables(const PauliString& ps) {
  if (ps.is_identity()) throw std::invalid_argument("build_pm_observables: identity Pauli");
  require_dense(ps.n, "build_pm_observables");
  PMObservables out;
  out.ps = ps;
  out.sstar = ps.first_support();

  // +1/-1 eigenvectors of each single-qubit factor; identity qubits use
  // the computational basis (any vector is a +1 eigenvector of I)
  auto eigvecs = [](int code) -> std::pair<Vector, Vector> {
    Vector p(2), m(2);
    const double s = 1.0 / std::sqrt(2.0);
    switch (code) {
      case 1: p << s, s; m << s, -s; break;                         // X
      case 2: p << s, complex(0, s); m << s, complex(0, -s); break;  // Y
      default: p << 1, 0; m << 0, 1; break;                         // Z and I
    }
    return {p, m};
  };

  const long d = 1L << ps.n;
  Vector one = Vector::Ones(1), flip = Vector::Ones(1);
  Matrix proj_rest_plus = Matrix::Ones(1, 1), qplus = Matrix::Ones(1, 1), qminus = Matrix::Ones(1, 1);
  for (int q = 1; q <= ps.n; ++q) {
    auto [vp, vm] = eigvecs(ps.code_at(q));
    Matrix factor_plus, factor_minus;
    Vector state_one, state_flip;
    if (q == out.sstar) {
      factor_plus = vm * vp.adjoint() + vp * vm.adjoint();
      factor_minus = complex(0, 1) * (vm * vp.adjoint()) - complex(0, 1) * (vp * vm.adjoint());
      state_one = vp;
      state_flip = vm;
    } else {
      factor_plus = vp * vp.adjoint();
      factor_minus = factor_plus;
      state_one = vp;
      state_flip = vp;
    }
    auto kron = [](const Matrix& a, const Matrix& b) {
      Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
      for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      return r;
    };
    qplus = kron(qplus, factor_plus);
    qminus = kron(qminus, factor_minus);
    Vector next_one(one.size() * 2), next_flip(flip.size() * 2);
    for (long i = 0; i < one.size(); ++i) {
      next_one.segment(2 * i, 2) = one(i) * state_one;
      next_flip.segment(2 * i, 2) = flip(i) * state_flip;
    }
    one = next_one;
    flip = next_flip;
  }
  out.plus = qplus;
  out.minus = qminus;
  out.initial_state = (one + flip) / std::sqrt(2.0);
  (void)d;
  return out;
}

// i.i.d. +/-1 outcomes with mean <state|O|state>
inline std::vector<int> measure_pm_observable(const Vector& state, const Matrix& observable,
                                              Rng& rng, long long shots) {
  const double mean = std::real(complex(state.adjoint() * observable * state));
  const double p_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(shots));
  for (long long i = 0; i < shots; ++i) out.push_back(rng.bernoulli(p_plus) ? 1 : -1);
  return out;
}

// Simulated black-box access to e^{-iHt}. Protocol code sees only the
// sampling and measurement operations; the hidden Hamiltonian itself is
// reachable only through the *_exact diagnostics used by tests.
class EvolutionOracle {
public:
  EvolutionOracle(PauliHamiltonian h, std::uint64_t seed)
      : h_(std::make_shared<const PauliHamiltonian>(std::move(h))),
        ledger_(std::make_shared<TimeLedger>()),
        rng_(seed) {
    require_dense(h_->n(), "EvolutionOracle");
  }

  int n() const { return h_->n(); }
  Rng& rng() { return rng_; }
  TimeLedger& ledger() { return *ledger_; }
  const TimeLedger& ledger() const { return *ledger_; }
  void set_phase(std::string phase) { phase_ = std::move(phase); }
  const std::string& phase() const { return phase_; }
  double time_scale() const { return scale_; }

  // View of the same dynamics with all queried durations multiplied by
  // `factor` before they reach the physical Hamiltonian (i.e. the
  // effective Hamiltonian is factor * H). Shares the ledger.
  EvolutionOracle rescaled(double factor) {
    EvolutionOracle view(*this);
    view.scale_ *= factor;
    view.rng_ = rng_.spawn();
    view.step_cache_.clear();  // cached steps bake in the old scale
    return view;
  }

  // ---- Bell sampling -------------------------------------------------

  // One circuit's exact Pauli distribution {|V_x|^2}; no ledger charge.
  std::vector<double> exact_bell_distribution(const DressedCircuit& c) const {
    const PauliSpectrum spec = pauli_spectrum({n(), circuit_unitary(c)});
    std::vector<double> probs(spec.coefficients.size());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(spec.coefficients[i]);
    return probs;
  }

  // Reusable sampler; the distribution is computed once per circuit and
  // every shot still charges the full physical evolution time.
  class BellSampler {
  public:
    BellSampler(EvolutionOracle& oracle, const DressedCircuit& c)
        : oracle_(oracle),
          n_(oracle.n()),
          per_shot_time_(c.unknown_time_total() * oracle.scale_),
          probs_(oracle.exact_bell_distribution(c)),
          sampler_(probs_) {}

    PauliString sample() {
      oracle_.ledger_->charge(oracle_.phase_, per_shot_time_, 1);
      return PauliString::from_index(n_, sampler_.draw(oracle_.rng_));
    }

    const std::vector<double>& distribution() const { return probs_; }

  private:
    EvolutionOracle& oracle_;
    int n_;
    double per_shot_time_;
    std::vector<double> probs_;
    CategoricalSampler sampler_;
  };

  BellSampler make_sampler(const DressedCircuit& c) { return BellSampler(*this, c); }

  std::vector<PauliString> bell_sample(const DressedCircuit& c, long long shots) {
    std::vector<PauliString> out;
    if (shots <= 0) return out;
    BellSampler sampler = make_sampler(c);
    out.reserve(static_cast<std::size_t>(shots));
    for (long long i = 0; i < shots; ++i) out.push_back(sampler.sample());
    return out;
  }

  // ---- state evolution ----------------------------------------------

  Vector evolve_state(const DressedCircuit& c, const Vector& initial) {
    if (initial.size() != (1L << n())) throw std::invalid_argument("evolve_state: dimension mismatch");
    if (std::abs(initial.norm() - 1.0) > 1e-9) throw std::invalid_argument("evolve_state: state not normalized");
    Vector state = initial;
    for (std::uint64_t rep = 0; rep < c.reps; ++rep)
      for (const auto& seg : c.segments)
        state = seg.unknown ? Vector(step_unitary(seg.t) * state) : Vector(seg.u * state);
    ledger_->charge(phase_, c.unknown_time_total() * scale_, 1);
    return state;
  }

  // e^{-i H_eff t} for one unknown segment (effective H includes the scale)
  Matrix step_unitary(double t) const { return propagator().unitary(t * scale_); }

  // ---- reshaped (twirled) evolution for coefficient learning ---------

  // Exact expectations <O_s^+>, <O_s^-> after r2 steps of the commutant
  // twirl channel applied to the robust-frequency initial state.
  //
  // Averaging each step over its fresh uniform Q in K_{P_s} gives the
  // per-step twirled channel, and the composed channel reproduces the
  // exact outcome marginal of the per-trajectory protocol. In the Pauli
  // transfer picture the twirl keeps only matrix elements between x and
  // x^P_s, so the channel splits into closed 2x2 blocks.
  std::pair<double, double> reshaped_expectations(const PMObservables& obs, double tau,
                                                  std::uint64_t r2) const {
    const int nq = n();
    const double dim = static_cast<double>(1L << nq);
    const Matrix u_step = step_unitary(tau / static_cast<double>(r2));

    const Matrix rho0 = obs.initial_state * obs.initial_state.adjoint();
    const PauliSpectrum c0 = pauli_spectrum({nq, rho0});
    const PauliSpectrum o_plus = pauli_spectrum({nq, obs.plus});
    const PauliSpectrum o_minus = pauli_spectrum({nq, obs.minus});

    auto partner_index = [&](std::uint64_t idx) {
      const PauliString x = PauliString::from_index(nq, idx);
      return PauliString(nq, x.a ^ obs.ps.a, x.b ^ obs.ps.b).index();
    };

    // blocks that intersect the support of rho0 (support is invariant)
    std::set<std::uint64_t> block_heads;
    for (std::uint64_t idx = 0; idx < c0.coefficients.size(); ++idx)
      if (std::norm(c0.coefficients[idx]) > 1e-24)
        block_heads.insert(std::min(idx, partner_index(idx)));

    std::vector<complex> c_final(c0.coefficients.size(), complex(0, 0));
    for (std::uint64_t x1 : block_heads) {
      const std::uint64_t x2 = partner_index(x1);
      Eigen::Matrix2cd transfer;
      for (int col = 0; col < 2; ++col) {
        const std::uint64_t y = col == 0 ? x1 : x2;
        const Matrix a = u_step * pauli_dense(PauliString::from_index(nq, y)) * u_step.adjoint();
        const PauliSpectrum sa = pauli_spectrum({nq, a});
        transfer(0, col) = sa.coefficients[x1];
        transfer(1, col) = sa.coefficients[x2];
      }
      Eigen::Vector2cd block(c0.coefficients[x1], x2 == x1 ? complex(0, 0) : c0.coefficients[x2]);
      // compose r2 identical steps
      Eigen::Matrix2cd acc = Eigen::Matrix2cd::Identity();
      std::uint64_t r = r2;
      Eigen::Matrix2cd base = transfer;
      while (r > 0) {
        if (r & 1) acc = acc * base;
        r >>= 1;
        if (r) base = base * base;
      }
      block = acc * block;
      c_final[x1] = block(0);
      if (x2 != x1) c_final[x2] = block(1);
    }

    complex ep(0, 0), em(0, 0);
    for (std::uint64_t x = 0; x < c_final.size(); ++x) {
      if (c_final[x] == complex(0, 0)) continue;
      ep += std::conj(o_plus.coefficients[x]) * c_final[x];
      em += std::conj(o_minus.coefficients[x]) * c_final[x];
    }
    return {dim * std::real(ep), dim * std::real(em)};
  }

  // Phase-signal estimate S = <O+> + i<O-> from the reshaped circuit.
  // Charges tau of physical evolution per shot (r2 steps of tau/r2).
  complex measure_reshaped(const PMObservables& obs, double tau, std::uint64_t r2,
                           long long shots_plus, long long shots_minus, bool exact_expectation) {
    auto [ep, em] = reshaped_expectations(obs, tau, r2);
    ledger_->charge(phase_, static_cast<double>(shots_plus + shots_minus) * tau * scale_,
                    shots_plus + shots_minus);
    if (exact_expectation) return {ep, em};
    auto sample_mean = [&](double mean, long long shots) {
      const double p_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
      long long sum = 0;
      for (long long i = 0; i < shots; ++i) sum += rng_.bernoulli(p_plus) ? 1 : -1;
      return static_cast<double>(sum) / static_cast<double>(shots);
    };
    return {sample_mean(ep, shots_plus), sample_mean(em, shots_minus)};
  }

  // dense unitary of the whole dressed circuit (simulator internal)
  Matrix circuit_unitary(const DressedCircuit& c) const {
    const long d = 1L << n();
    Matrix block = Matrix::Identity(d, d);
    for (const auto& seg : c.segments) {
      const Matrix& u = seg.unknown ? step_cache(seg.t) : seg.u;
      block = u * block;  // first segment acts first
    }
    return matrix_power(std::move(block), c.reps);
  }

  // spectral norm of the effective Hamiltonian (test diagnostic)
  double spectral_norm_exact() const {
    const auto& ev = propagator().eigenvalues();
    return scale_ * std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
  }

  const PauliHamiltonian& hidden_hamiltonian_for_tests() const { return *h_; }

private:
  const Propagator& propagator() const {
    if (!prop_) prop_ = std::make_shared<Propagator>(*h_);
    return *prop_;
  }

  const Matrix& step_cache(double t) const {
    auto it = step_cache_.find(t);
    if (it == step_cache_.end()) it = step_cache_.emplace(t, step_unitary(t)).first;
    return it->second;
  }

  std::shared_ptr<const PauliHamiltonian> h_;
  std::shared_ptr<TimeLedger> ledger_;
  Rng rng_;
  double scale_ = 1.0;
  std::string phase_ = "default";
  mutable std::shared_ptr<Propagator> prop_;
  mutable std::map<double, Matrix> step_cache_;
};

}  // namespace hamlearn
