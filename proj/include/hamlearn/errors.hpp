#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hamlearn {

// Raised when a request exceeds what the dense simulator can represent
// (as opposed to a malformed argument).
class capability_error : public std::runtime_error {
public:
  explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

// Largest qubit count the dense backend will touch. Overridable through
// HAMLEARN_DENSE_LIMIT; read once per process.
inline int dense_limit() {
  static const int limit = [] {
    if (const char* env = std::getenv("HAMLEARN_DENSE_LIMIT")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 8;
  }();
  return limit;
}

inline void require_dense(int n, const char* where) {
  if (n > dense_limit())
    throw capability_error(std::string(where) + ": n=" + std::to_string(n) +
                           " exceeds dense limit " + std::to_string(dense_limit()));
}

}  // namespace hamlearn
