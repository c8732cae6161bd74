#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace hamlearn {

// Unique root of (1 - cos t)/t^2 = c on (0, 2*pi). The left-hand side
// decreases from 1/2 to 0 on that interval, so bisection applies.
inline double t_star(double c) {
  if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("t_star: c must lie in (0, 1/2)");
  const double two_pi = 2.0 * M_PI;
  auto g = [](double t) { return (1.0 - std::cos(t)) / (t * t); };
  double lo = 1e-9, hi = two_pi;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > c)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// envelopes 1 - hF^2 t^2 <= Pr[I] <= 1 - 2c hF^2 t^2, clamped to [0, 1];
// valid when the caller enforces t <= t_star(c)/(2L)
inline std::pair<double, double> identity_prob_bounds(double h_frob, double t, double c) {
  const double s = h_frob * h_frob * t * t;
  const double lower = std::clamp(1.0 - s, 0.0, 1.0);
  const double upper = std::clamp(1.0 - 2.0 * c * s, 0.0, 1.0);
  return {lower, upper};
}

// Bernoulli KL divergence with the conventions 0 ln 0 = 0 and +inf when
// absolute continuity fails.
inline double kl_divergence(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("kl_divergence: probabilities required");
  const double inf = std::numeric_limits<double>::infinity();
  double d = 0.0;
  if (x > 0.0) {
    if (y == 0.0) return inf;
    d += x * std::log(x / y);
  }
  if (x < 1.0) {
    if (y == 1.0) return inf;
    d += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
  }
  return std::max(0.0, d);
}

// two-branch quadratic lower bound on the Bernoulli KL divergence
inline double kl_lower_bound(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("kl_lower_bound: probabilities required");
  if (x == y) return 0.0;
  const double diff2 = (x - y) * (x - y);
  if (x < y) {
    if (y == 0.0) return 0.0;
    return diff2 / (2.0 * y);
  }
  if (x == 0.0) return 0.0;
  return diff2 / (2.0 * x);
}

// Shot plan for distinguishing ||H||_F <= eps1 from >= eps2 by the
// identity-sampling rate.
struct TolerantPlan {
  double c = 0.0;       // envelope constant, the optimizer of the error exponent
  double t = 0.0;       // evolution time per shot
  long long shots = 0;  // N
  double p_half = 0.0;  // decision threshold on the non-identity fraction
  double p1 = 0.0, p2 = 0.0;
  double eps1 = 0.0, eps2 = 0.0, delta = 0.0, spectral_bound = 0.0;
};

inline TolerantPlan tolerant_plan(double spectral_bound, double eps1, double eps2, double delta) {
  if (!(eps1 >= 0.0 && eps1 < eps2)) throw std::invalid_argument("tolerant_plan: need 0 <= eps1 < eps2");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("tolerant_plan: delta in (0,1)");
  if (!(spectral_bound > 0.0)) throw std::invalid_argument("tolerant_plan: spectral bound must be positive");
  TolerantPlan plan;
  plan.eps1 = eps1;
  plan.eps2 = eps2;
  plan.delta = delta;
  plan.spectral_bound = spectral_bound;
  plan.c = (eps1 * eps1 + eps2 * eps2) / (4.0 * eps2 * eps2);
  // the small-angle time, capped at the validity region of the envelope
  plan.t = std::min(std::sqrt(3.0 - 6.0 * plan.c) / spectral_bound,
                    t_star(plan.c) / (2.0 * spectral_bound));
  plan.p1 = eps1 * eps1 * plan.t * plan.t;
  plan.p2 = 2.0 * plan.c * eps2 * eps2 * plan.t * plan.t;
  plan.p_half = (3.0 * eps1 * eps1 + eps2 * eps2) * plan.t * plan.t / 4.0;
  const double gap = 2.0 * plan.c * eps2 * eps2 - eps1 * eps1;
  plan.shots = static_cast<long long>(
      std::ceil(16.0 * plan.c * eps2 * eps2 * std::log(1.0 / delta) / (gap * gap * plan.t * plan.t)));
  return plan;
}

// Intolerant regime: c = 1/4 fixed, early-exit sampling, factor-2 shot
// safety over the bare Chernoff count.
struct IntolerantPlan {
  double c = 0.25;
  double t = 0.0;
  long long shots = 0;
  double eps = 0.0, delta = 0.0, spectral_bound = 0.0;
};

inline IntolerantPlan intolerant_plan(double spectral_bound, double eps, double delta) {
  if (!(eps > 0.0)) throw std::invalid_argument("intolerant_plan: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("intolerant_plan: delta in (0,1)");
  if (!(spectral_bound > 0.0)) throw std::invalid_argument("intolerant_plan: spectral bound must be positive");
  IntolerantPlan plan;
  plan.eps = eps;
  plan.delta = delta;
  plan.spectral_bound = spectral_bound;
  plan.t = t_star(plan.c) / (2.0 * spectral_bound);
  plan.shots = 2 * static_cast<long long>(
      std::ceil(std::log(1.0 / delta) / (2.0 * plan.c * eps * eps * plan.t * plan.t)));
  return plan;
}

}  // namespace hamlearn
