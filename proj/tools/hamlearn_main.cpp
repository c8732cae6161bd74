// Command-line front end: instance generation, protocol drivers,
// bound-verification sweeps, and scaling studies.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hamlearn/bounds.hpp"
#include "hamlearn/dense.hpp"
#include "hamlearn/emptiness.hpp"
#include "hamlearn/json_io.hpp"
#include "hamlearn/learner.hpp"
#include "hamlearn/oracle.hpp"
#include "hamlearn/sparsity.hpp"

using namespace hamlearn;

namespace {

constexpr const char* kVersion = "0.1.0";

int g_threads = 1;

json make_manifest(const std::string& command, const json& params, std::uint64_t seed,
                   const std::string& out_path) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return {{"command", command}, {"params", params},       {"seed", seed},
          {"version", kVersion}, {"timestamp", stamp},    {"out", out_path}};
}

void write_manifest(const std::string& command, const json& params, std::uint64_t seed,
                    const std::string& out_path) {
  if (out_path.empty()) return;
  save_json(make_manifest(command, params, seed, out_path), out_path + ".manifest.json");
}

void emit(const json& doc, const std::string& out_path) {
  std::cout << doc.dump(2) << "\n";
  if (!out_path.empty()) save_json(doc, out_path);
}

// ledger rows as (bucket, phase, evolution_time, queries); phase labels
// of the form "AI:3" split into bucket 3, phase AI
void write_ledger_csv(const TimeLedger& ledger, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << "bucket,phase,evolution_time,queries\n";
  for (const auto& [label, time] : ledger.phase_time()) {
    std::string phase = label, bucket = "-";
    const auto colon = label.find(':');
    if (colon != std::string::npos) {
      phase = label.substr(0, colon);
      bucket = label.substr(colon + 1);
    }
    out << bucket << "," << phase << "," << time << "," << ledger.phase_queries().at(label) << "\n";
  }
}

// deterministic per-trial fan-out over at most g_threads workers
template <typename Fn>
void parallel_trials(int trials, Fn&& body) {
  const int workers = std::max(1, std::min(g_threads, trials));
  if (workers == 1) {
    for (int i = 0; i < trials; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < trials; i += workers) body(i);
    });
  for (auto& th : pool) th.join();
}

int cmd_gen(int n, std::size_t m, double lo, double hi, std::uint64_t seed,
            const std::string& out_path) {
  Rng rng(seed);
  const PauliHamiltonian h = random_sparse_hamiltonian(n, m, lo, hi, rng);
  emit(hamiltonian_to_json(h), out_path);
  write_manifest("gen", {{"n", n}, {"M", m}, {"coeff_min", lo}, {"coeff_max", hi}}, seed, out_path);
  return 0;
}

int cmd_test_empty(const std::string& path, const std::string& mode, double spectral_bound,
                   double eps, double eps1, double eps2, double delta, std::uint64_t seed,
                   const std::string& out_path) {
  EvolutionOracle oracle(load_hamiltonian(path), seed);
  EmptinessVerdict v;
  if (mode == "intolerant") {
    v = test_intolerant(oracle, spectral_bound, eps, delta);
  } else {
    v = test_tolerant(oracle, spectral_bound, eps1, eps2, delta);
  }
  emit(emptiness_verdict_to_json(v, mode), out_path);
  write_manifest("test-empty",
                 {{"hamiltonian", path}, {"mode", mode}, {"spectral_bound", spectral_bound},
                  {"epsilon", eps}, {"epsilon1", eps1}, {"epsilon2", eps2}, {"delta", delta}},
                 seed, out_path);
  return v.verdict == Emptiness::EMPTY ? 0 : 1;
}

int cmd_learn(const std::string& path, std::size_t m, double eps, double delta,
              std::uint64_t seed, const std::string& out_path, const std::string& ledger_path) {
  const PauliHamiltonian truth = load_hamiltonian(path);
  EvolutionOracle oracle(truth, seed);
  LearnerConfig cfg;
  cfg.sparsity = m;
  cfg.eps = eps;
  cfg.delta = delta;
  const LearnedHamiltonian learned = hierarchical_learn(oracle, cfg);

  double linf = 0.0;
  for (const auto& [p, mu] : residual(truth, learned.estimate, 1.0).terms())
    linf = std::max(linf, std::abs(mu));
  json doc = learned_to_json(learned);
  doc["linf_error"] = linf;
  emit(doc, out_path);
  if (!ledger_path.empty()) write_ledger_csv(learned.ledger, ledger_path);
  write_manifest("learn",
                 {{"hamiltonian", path}, {"M", m}, {"epsilon", eps}, {"delta", delta},
                  {"ledger", ledger_path}},
                 seed, out_path);
  return 0;
}

int cmd_test_sparse(const std::string& path, std::size_t m, double eps, double spectral_bound,
                    double delta, std::uint64_t seed, const std::string& out_path) {
  EvolutionOracle oracle(load_hamiltonian(path), seed);
  const SparsityVerdict v = test_sparsity(oracle, m, eps, spectral_bound, delta);
  emit(sparsity_verdict_to_json(v), out_path);
  write_manifest("test-sparse",
                 {{"hamiltonian", path}, {"M", m}, {"epsilon", eps},
                  {"spectral_bound", spectral_bound}, {"delta", delta}},
                 seed, out_path);
  return v.verdict == Sparsity::M_SPARSE ? 0 : 1;
}

int cmd_verify_bounds(std::uint64_t seed, int trials, const std::string& out_path) {
  std::ostringstream csv;
  csv << "check,trial,lhs,rhs,bound_satisfied\n";
  std::vector<std::string> rows(static_cast<std::size_t>(std::max(0, trials)) * 4);

  parallel_trials(trials, [&](int i) {
    Rng rng(seed + static_cast<std::uint64_t>(i) * 1000003ull);
    std::ostringstream line;

    // identity-probability envelope
    {
      const PauliHamiltonian h = random_sparse_hamiltonian(3, 3, 0.1, 1.0, rng);
      const double ell = spectral_norm(h);
      const double c = rng.uniform(0.05, 0.45);
      const double t = rng.uniform(0.0, 1.0) * t_star(c) / (2.0 * ell);
      const auto [lower, upper] = identity_prob_bounds(frobenius_norm(h), t, c);
      const double exact = identity_probability_exact(h, t);
      const bool ok = exact >= lower - 1e-12 && exact <= upper + 1e-12;
      line << "identity_bounds," << i << "," << exact << "," << lower << ";" << upper << ","
           << (ok ? "true" : "false") << "\n";
    }
    // Trotter error
    {
      const PauliHamiltonian h = random_sparse_hamiltonian(3, 3, 0.1, 1.0, rng);
      const PauliHamiltonian hhat = random_sparse_hamiltonian(3, 3, 0.1, 1.0, rng);
      const double t = rng.uniform(0.05, 0.5);
      const std::uint64_t r = 1 + rng.uniform_int(16);
      const double exact = trotter_error_exact(h, hhat, t / static_cast<double>(r), r);
      const double bound = trotter_error_bound(t, r, frobenius_norm(hhat), spectral_norm(h));
      line << "trotter," << i << "," << exact << "," << bound << ","
           << (exact <= bound + 1e-12 ? "true" : "false") << "\n";
    }
    // KL lower bound
    {
      const double x = rng.uniform(0.0, 1.0), y = rng.uniform(0.001, 0.999);
      const double exact = kl_divergence(x, y), bound = kl_lower_bound(x, y);
      line << "kl," << i << "," << bound << "," << exact << ","
           << (bound <= exact + 1e-12 ? "true" : "false") << "\n";
    }
    // Bell-state norm identity
    {
      const PauliHamiltonian h = random_sparse_hamiltonian(2, 3, 0.1, 1.0, rng);
      const DenseOperator u = evolve(h, rng.uniform(0.0, 2.0));
      const double lhs = bell_state_norm(u);
      const double rhs = std::sqrt(u.m.squaredNorm() / 4.0);
      line << "bell_norm," << i << "," << lhs << "," << rhs << ","
           << (std::abs(lhs - rhs) < 1e-12 ? "true" : "false") << "\n";
    }
    rows[static_cast<std::size_t>(i)] = line.str();
  });

  for (const std::string& r : rows) csv << r;
  std::cout << csv.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << csv.str();
  }
  write_manifest("verify-bounds", {{"trials", trials}}, seed, out_path);
  return 0;
}

int cmd_scaling(const std::string& sweep, const std::string& grid_arg, int n, std::size_t m,
                double eps, int trials, std::uint64_t seed, const std::string& out_path) {
  std::vector<double> grid;
  {
    std::stringstream ss(grid_arg.empty()
                             ? (sweep == "epsilon" ? std::string("0.2,0.1,0.05,0.025")
                                                   : std::string("2,3,4,5"))
                             : grid_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
  }

  std::ostringstream csv;
  csv << "point,mean_total_time,std_total_time\n";
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double point = grid[gi];
    std::vector<double> times(static_cast<std::size_t>(trials));
    parallel_trials(trials, [&](int i) {
      const std::uint64_t trial_seed =
          seed + static_cast<std::uint64_t>(gi) * 7919ull + static_cast<std::uint64_t>(i) * 104729ull;
      Rng rng(trial_seed);
      LearnerConfig cfg;
      cfg.sparsity = sweep == "epsilon" ? m : static_cast<std::size_t>(point);
      cfg.eps = sweep == "epsilon" ? point : eps;
      cfg.delta = 0.1;
      const PauliHamiltonian h = random_sparse_hamiltonian(n, cfg.sparsity, 0.15, 1.0, rng);
      EvolutionOracle oracle(h, trial_seed ^ 0x9e3779b97f4a7c15ull);
      const LearnedHamiltonian learned = hierarchical_learn(oracle, cfg);
      times[static_cast<std::size_t>(i)] = learned.ledger.total_time();
    });
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    var /= static_cast<double>(times.size());
    csv << point << "," << mean << "," << std::sqrt(var) << "\n";
  }
  std::cout << csv.str();
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << csv.str();
  }
  write_manifest("scaling",
                 {{"sweep", sweep}, {"grid", grid}, {"n", n}, {"M", m}, {"epsilon", eps},
                  {"trials", trials}},
                 seed, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hamlearn: Bell-sampling Hamiltonian property testing and learning"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--threads accepted after the subcommand name
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "RNG seed, honored by every command")->capture_default_str();
  app.add_option("--threads", g_threads, "worker cap for trial fan-out")->capture_default_str();

  int n = 3;
  std::size_t m = 3;
  double eps = 0.1, eps1 = 0.0, eps2 = 0.1, delta = 0.1, spectral_bound = 1.0;
  double coeff_min = 0.1, coeff_max = 1.0;
  std::string ham_path, out_path, ledger_path, mode = "intolerant", sweep = "epsilon", grid;
  int trials = 10;

  auto* gen = app.add_subcommand("gen", "generate a random M-sparse Hamiltonian JSON file");
  gen->add_option("--n", n, "qubit count")->required();
  gen->add_option("--M", m, "term count")->required();
  gen->add_option("--coeff-min", coeff_min, "minimum |coefficient|")->capture_default_str();
  gen->add_option("--coeff-max", coeff_max, "maximum |coefficient|")->capture_default_str();
  gen->add_option("--out", out_path, "output path");

  auto* te = app.add_subcommand("test-empty", "run an emptiness tester");
  te->add_option("--hamiltonian", ham_path, "Hamiltonian JSON path")->required();
  te->add_option("--mode", mode, "intolerant or tolerant")
      ->check(CLI::IsMember({"intolerant", "tolerant"}))->capture_default_str();
  te->add_option("--spectral-bound", spectral_bound, "promised bound L on ||H||_2")
      ->capture_default_str();
  te->add_option("--epsilon", eps, "intolerant threshold")->capture_default_str();
  te->add_option("--epsilon1", eps1, "tolerant lower threshold")->capture_default_str();
  te->add_option("--epsilon2", eps2, "tolerant upper threshold")->capture_default_str();
  te->add_option("--delta", delta, "failure probability")->capture_default_str();
  te->add_option("--out", out_path, "verdict JSON path");

  auto* learn = app.add_subcommand("learn", "run the hierarchical sparse learner");
  learn->add_option("--hamiltonian", ham_path, "Hamiltonian JSON path")->required();
  learn->add_option("--M", m, "sparsity bound")->required();
  learn->add_option("--epsilon", eps, "target l_inf accuracy")->capture_default_str();
  learn->add_option("--delta", delta, "failure probability")->capture_default_str();
  learn->add_option("--out", out_path, "learned JSON path");
  learn->add_option("--ledger", ledger_path, "ledger CSV path");

  auto* ts = app.add_subcommand("test-sparse", "run the M-sparsity tester");
  ts->add_option("--hamiltonian", ham_path, "Hamiltonian JSON path")->required();
  ts->add_option("--M", m, "sparsity bound")->required();
  ts->add_option("--epsilon", eps, "farness threshold")->capture_default_str();
  ts->add_option("--spectral-bound", spectral_bound, "promised bound L")->capture_default_str();
  ts->add_option("--delta", delta, "failure probability")->capture_default_str();
  ts->add_option("--out", out_path, "verdict JSON path");

  auto* vb = app.add_subcommand("verify-bounds", "Monte Carlo checks of the analytic bounds");
  vb->add_option("--trials", trials, "instances per check")->capture_default_str();
  vb->add_option("--out", out_path, "report CSV path");

  auto* sc = app.add_subcommand("scaling", "total-evolution-time scaling sweep");
  sc->add_option("--sweep", sweep, "epsilon or sparsity")
      ->check(CLI::IsMember({"epsilon", "sparsity"}))->capture_default_str();
  sc->add_option("--grid", grid, "comma-separated sweep points");
  sc->add_option("--n", n, "qubit count")->capture_default_str();
  sc->add_option("--M", m, "sparsity (epsilon sweep)")->capture_default_str();
  sc->add_option("--epsilon", eps, "accuracy (sparsity sweep)")->capture_default_str();
  sc->add_option("--trials", trials, "seeds per point")->capture_default_str();
  sc->add_option("--out", out_path, "CSV path");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen(n, m, coeff_min, coeff_max, seed, out_path);
    if (te->parsed()) {
      if (mode == "tolerant" && !(eps1 < eps2)) {
        std::cerr << "test-empty: tolerant mode needs epsilon1 < epsilon2\n";
        return 2;
      }
      return cmd_test_empty(ham_path, mode, spectral_bound, eps, eps1, eps2, delta, seed, out_path);
    }
    if (learn->parsed()) return cmd_learn(ham_path, m, eps, delta, seed, out_path, ledger_path);
    if (ts->parsed()) return cmd_test_sparse(ham_path, m, eps, spectral_bound, delta, seed, out_path);
    if (vb->parsed()) return cmd_verify_bounds(seed, trials, out_path);
    if (sc->parsed()) return cmd_scaling(sweep, grid, n, m, eps, trials, seed, out_path);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const capability_error& e) {
    std::cerr << "capability error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
