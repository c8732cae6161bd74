#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace hamlearn {

// Deterministic RNG wrapper. std::*_distribution output is
// implementation-defined, so all draws are derived from raw mt19937_64
// words to keep seeded runs bit-reproducible.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, bound)
  std::uint64_t uniform_int(std::uint64_t bound) {
    // rejection to avoid modulo bias
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t raw() { return gen_(); }

  // child generator with a seed derived from this stream
  Rng spawn() { return Rng(gen_()); }

private:
  std::mt19937_64 gen_;
};

// Categorical sampler over a fixed weight vector (weights need not be
// normalized). Binary search on the cumulative table.
class CategoricalSampler {
public:
  explicit CategoricalSampler(const std::vector<double>& weights) {
    cum_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i] > 0 ? weights[i] : 0.0;
      cum_[i] = acc;
    }
    total_ = acc;
  }

  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * total_;
    std::size_t lo = 0, hi = cum_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] <= u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

private:
  std::vector<double> cum_;
  double total_ = 0.0;
};

}  // namespace hamlearn
