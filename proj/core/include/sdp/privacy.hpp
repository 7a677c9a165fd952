#pragma once

#include <cstdint>

namespace sdp {

struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-6;
  double beta = 0.05;  // failure probability of accuracy statements

  void validate() const;
};

// Analytic smoothness certificate for a noise distribution under shifts
// up to k. delta_exact is filled only by the exact-pmf oracle.
struct SmoothnessReport {
  double epsilon_bound = 0.0;
  double delta_bound = 0.0;
  double delta_exact = -1.0;  // < 0 means "not computed"
  std::uint64_t shift_range = 0;
};

struct CMDerivedParams {
  std::uint32_t rows = 0;         // tau
  std::uint64_t buckets = 0;      // s, per row
  double gamma = 0.0;             // per-cell Bernoulli rate
  double gamma_formula = 0.0;     // pre-clamp value of the formula
  bool gamma_clamped = false;     // true when the formula exceeded 1
};

// Blanket-size parameter for the Hadamard protocol:
// ceil(36 k^2 / eps^2 * ln(e k / (eps delta))).
std::uint64_t had_rho(double eps, double delta, std::uint32_t k);

// Count-Min shape and noise rate: rows = ceil(log2(2B/beta)), buckets =
// 2kn, and gamma = min(1, max(c_util ln n, 90 k^2 tau^2 ln(2 tau k /
// delta) / eps^2) / n). The privacy floor is the explicit requirement of
// the Count-Min privacy lemma; the utility floor constant is configurable.
CMDerivedParams cm_params(std::uint64_t n, std::uint64_t domain_size,
                          std::uint32_t k, double eps, double delta,
                          double beta, double c_util = 1.0);

// Closed-form smoothness of Bin(n, gamma): epsilon = ln((1+alpha)/(1-alpha)),
// delta = exp(-alpha^2 gamma n / 8) + exp(-alpha^2 gamma n / (8 + 2 alpha)).
// Requires gamma in [0, 1/2], alpha in [0, 1), k <= alpha gamma n / 2.
SmoothnessReport binomial_smoothness_bound(std::uint64_t n, double gamma,
                                           double alpha, std::uint64_t k);

// Exact smoothness level of Bin(n, gamma): the largest, over shifts
// k' in [-k, k] \ {0}, tail mass of { y : pmf(y)/pmf(y + k') >= e^{|k'| eps} }.
// Computed from the exact pmf in log space; tractable for n up to ~1e6.
double binomial_smoothness_exact(std::uint64_t n, double gamma, double eps,
                                 std::uint64_t k);

// Per-coordinate smoothness level a noise distribution must satisfy so
// that adding it to a sensitivity-Delta, k-incremental function gives
// (eps, delta)-DP: divide both budgets by Delta.
struct PerCoordinateBudget {
  double epsilon = 0.0;
  double delta = 0.0;
};
PerCoordinateBudget noise_mechanism_params(std::uint64_t sensitivity,
                                           std::uint64_t incrementality,
                                           double eps, double delta);

// Shuffle-amplified epsilon of an (eps_local, 0)-DP single-message
// randomizer: c_amp * eps_local * e^{eps_local} * sqrt(ln(1/delta)/n).
// Only the O(.) shape of this bound is known; c_amp exposes the hidden
// constant and the result is a bound shape, not a certified privacy level.
// Requires eps_local <= ln(n / ln(1/delta)) / 2.
double amplified_epsilon(double eps_local, std::uint64_t n, double delta,
                         double c_amp = 1.0);

// Largest eps_local admitted by amplified_epsilon's precondition.
double amplification_regime_limit(std::uint64_t n, double delta);

// Inverts amplified_epsilon in eps_local by bisection: the largest local
// epsilon within the amplification regime whose amplified level is at
// most eps_target.
double invert_amplified_epsilon(double eps_target, std::uint64_t n,
                                double delta, double c_amp = 1.0);

}  // namespace sdp
