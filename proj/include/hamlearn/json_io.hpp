#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "hamlearn/emptiness.hpp"
#include "hamlearn/learner.hpp"
#include "hamlearn/pauli.hpp"
#include "hamlearn/sparsity.hpp"

namespace hamlearn {

using json = nlohmann::json;

// {"n": <int>, "terms": [{"pauli": "<I/X/Y/Z string>", "coeff": <float>}]}
inline json hamiltonian_to_json(const PauliHamiltonian& h) {
  json terms = json::array();
  for (const auto& [p, mu] : h.terms()) terms.push_back({{"pauli", p.str()}, {"coeff", mu}});
  return {{"n", h.n()}, {"terms", terms}};
}

inline PauliHamiltonian hamiltonian_from_json(const json& doc) {
  if (!doc.contains("n") || !doc.contains("terms"))
    throw std::invalid_argument("Hamiltonian document needs \"n\" and \"terms\"");
  const int n = doc.at("n").get<int>();
  PauliHamiltonian h(n);
  std::set<std::string> seen;
  for (const auto& entry : doc.at("terms")) {
    const std::string pauli = entry.at("pauli").get<std::string>();
    const double coeff = entry.at("coeff").get<double>();
    if (static_cast<int>(pauli.size()) != n)
      throw std::invalid_argument("Pauli string length does not match n: " + pauli);
    if (!seen.insert(pauli).second)
      throw std::invalid_argument("duplicate Pauli key: " + pauli);
    const PauliString p = PauliString::parse(pauli);
    if (p.is_identity()) throw std::invalid_argument("identity term not allowed");
    h.set_term(p, coeff);
  }
  return h;
}

inline PauliHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json doc;
  in >> doc;
  return hamiltonian_from_json(doc);
}

inline void save_json(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << doc.dump(2) << "\n";
}

inline json ledger_to_json(const TimeLedger& ledger) {
  json phases = json::object();
  for (const auto& [name, time] : ledger.phase_time())
    phases[name] = {{"time", time}, {"queries", ledger.phase_queries().at(name)}};
  return {{"total_time", ledger.total_time()},
          {"queries", ledger.total_queries()},
          {"phases", phases}};
}

inline json emptiness_verdict_to_json(const EmptinessVerdict& v, const std::string& mode) {
  json out = {{"verdict", v.verdict == Emptiness::EMPTY ? "EMPTY" : "NOT_EMPTY"},
              {"mode", mode},
              {"shots_planned", v.shots_planned},
              {"shots_used", v.shots_used},
              {"nonidentity_count", v.nonidentity_count},
              {"t", v.t},
              {"ledger", ledger_to_json(v.ledger)}};
  if (mode == "tolerant") {
    out["plan"] = {{"c", v.tolerant.c},      {"t", v.tolerant.t},
                   {"N", v.tolerant.shots},  {"p_half", v.tolerant.p_half},
                   {"p1", v.tolerant.p1},    {"p2", v.tolerant.p2},
                   {"eps1", v.tolerant.eps1},{"eps2", v.tolerant.eps2},
                   {"delta", v.tolerant.delta}};
  } else {
    out["plan"] = {{"c", v.intolerant.c},
                   {"t", v.intolerant.t},
                   {"N", v.intolerant.shots},
                   {"eps", v.intolerant.eps},
                   {"delta", v.intolerant.delta}};
  }
  return out;
}

inline json learned_to_json(const LearnedHamiltonian& learned) {
  json prov = json::array();
  for (const auto& [p, info] : learned.provenance)
    prov.push_back({{"pauli", p.str()}, {"bucket", info.bucket}, {"rounds", info.rounds}});
  json out = hamiltonian_to_json(learned.estimate);
  out["provenance"] = prov;
  out["ledger"] = ledger_to_json(learned.ledger);
  return out;
}

inline json sparsity_verdict_to_json(const SparsityVerdict& v) {
  return {{"verdict", v.verdict == Sparsity::M_SPARSE ? "M_SPARSE" : "NOT_M_SPARSE"},
          {"eps1_prime", v.eps1_prime},
          {"eps2_prime", v.eps2_prime},
          {"t", v.t},
          {"trotter_steps", v.trotter_steps},
          {"learning_time", v.learning_time},
          {"testing_time", v.testing_time},
          {"emptiness", emptiness_verdict_to_json(v.emptiness, "tolerant")},
          {"learned", hamiltonian_to_json(v.learned)},
          {"ledger", ledger_to_json(v.ledger)}};
}

}  // namespace hamlearn
