#include "sdp/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "sdp/error.hpp"

namespace sdp {

void PrivacyParams::validate() const {
  if (!(epsilon > 0)) throw ParameterError("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw ParameterError("delta must be in (0,1)");
  if (!(beta > 0 && beta < 1)) throw ParameterError("beta must be in (0,1)");
}

std::uint64_t had_rho(double eps, double delta, std::uint32_t k) {
  if (!(eps > 0 && eps <= 1)) throw ParameterError("had_rho: eps in (0, 1]");
  if (!(delta > 0 && delta <= 1)) {
    throw ParameterError("had_rho: delta in (0, 1]");
  }
  if (k < 1) throw ParameterError("had_rho: k >= 1");
  const double kd = static_cast<double>(k);
  const double v =
      36.0 * kd * kd / (eps * eps) * std::log(std::exp(1.0) * kd / (eps * delta));
  return static_cast<std::uint64_t>(std::ceil(v));
}

CMDerivedParams cm_params(std::uint64_t n, std::uint64_t domain_size,
                          std::uint32_t k, double eps, double delta,
                          double beta, double c_util) {
  if (n < 1) throw ParameterError("cm_params: n >= 1");
  if (domain_size < 2) throw ParameterError("cm_params: B >= 2");
  if (k < 1) throw ParameterError("cm_params: k >= 1");
  if (!(eps > 0)) throw ParameterError("cm_params: epsilon must be positive");
  if (!(delta > 0 && delta < 1)) {
    throw ParameterError("cm_params: delta must be in (0,1)");
  }
  if (!(beta > 0 && beta <= 1)) {  // beta = 1 is the boundary tau = log2(2B)
    throw ParameterError("cm_params: beta must be in (0,1]");
  }

  CMDerivedParams out;
  out.rows = static_cast<std::uint32_t>(
      std::ceil(std::log2(2.0 * static_cast<double>(domain_size) / beta)));
  out.buckets = 2 * static_cast<std::uint64_t>(k) * n;

  const double kd = static_cast<double>(k);
  const double tau = static_cast<double>(out.rows);
  const double privacy_floor =
      90.0 * kd * kd * tau * tau * std::log(2.0 * tau * kd / delta) /
      (eps * eps);
  const double utility_floor = c_util * std::log(static_cast<double>(n));
  const double gamma_n = std::max(privacy_floor, utility_floor);
  out.gamma_formula = gamma_n / static_cast<double>(n);
  out.gamma = out.gamma_formula;
  if (out.gamma > 1.0) {
    out.gamma = 1.0;
    out.gamma_clamped = true;
  }
  return out;
}

SmoothnessReport binomial_smoothness_bound(std::uint64_t n, double gamma,
                                           double alpha, std::uint64_t k) {
  if (!(gamma >= 0 && gamma <= 0.5)) {
    throw ParameterError("binomial_smoothness_bound: gamma in [0, 1/2]");
  }
  if (!(alpha >= 0 && alpha < 1)) {
    throw ParameterError(
        "binomial_smoothness_bound: alpha in [0, 1) (the bound diverges at "
        "alpha = 1)");
  }
  const double gn = gamma * static_cast<double>(n);
  if (static_cast<double>(k) > alpha * gn / 2.0) {
    throw ParameterError("binomial_smoothness_bound: need k <= alpha*gamma*n/2");
  }
  SmoothnessReport r;
  r.epsilon_bound = std::log((1.0 + alpha) / (1.0 - alpha));
  r.delta_bound = std::exp(-alpha * alpha * gn / 8.0) +
                  std::exp(-alpha * alpha * gn / (8.0 + 2.0 * alpha));
  r.shift_range = k;
  return r;
}

namespace {

// log pmf of Bin(n, gamma) for all y, computed by the recurrence
// pmf(y+1)/pmf(y) = (n-y) gamma / ((y+1)(1-gamma)).
std::vector<double> binomial_log_pmf(std::uint64_t n, double gamma) {
  std::vector<double> lp(n + 1);
  lp[0] = static_cast<double>(n) * std::log1p(-gamma);
  const double lr = std::log(gamma) - std::log1p(-gamma);
  for (std::uint64_t y = 0; y < n; ++y) {
    lp[y + 1] = lp[y] + lr + std::log(static_cast<double>(n - y)) -
                std::log(static_cast<double>(y + 1));
  }
  return lp;
}

double log_sum_exp(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(terms.begin(), terms.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace

double binomial_smoothness_exact(std::uint64_t n, double gamma, double eps,
                                 std::uint64_t k) {
  if (n > 1000000) {
    throw ParameterError("binomial_smoothness_exact: n too large for exact pmf");
  }
  if (!(gamma > 0 && gamma < 1)) {
    throw ParameterError("binomial_smoothness_exact: gamma in (0, 1)");
  }
  if (k == 0) return 0.0;

  const std::vector<double> lp = binomial_log_pmf(n, gamma);
  const auto sn = static_cast<std::int64_t>(n);
  double worst = 0.0;
  for (std::int64_t shift = -static_cast<std::int64_t>(k);
       shift <= static_cast<std::int64_t>(k); ++shift) {
    if (shift == 0) continue;
    const double threshold = static_cast<double>(std::llabs(shift)) * eps;
    std::vector<double> tail;
    for (std::int64_t y = 0; y <= sn; ++y) {
      const std::int64_t ys = y + shift;
      // pmf(y+shift) = 0 outside [0, n]: the ratio is infinite there.
      const bool exceeds =
          (ys < 0 || ys > sn) ? true : (lp[y] - lp[ys] >= threshold);
      if (exceeds) tail.push_back(lp[y]);
    }
    worst = std::max(worst, std::exp(log_sum_exp(tail)));
  }
  return worst;
}

PerCoordinateBudget noise_mechanism_params(std::uint64_t sensitivity,
                                           std::uint64_t incrementality,
                                           double eps, double delta) {
  if (sensitivity == 0) {
    throw ParameterError("noise_mechanism_params: sensitivity >= 1");
  }
  if (incrementality == 0) {
    throw ParameterError("noise_mechanism_params: incrementality >= 1");
  }
  const double d = static_cast<double>(sensitivity);
  return PerCoordinateBudget{eps / d, delta / d};
}

double amplification_regime_limit(std::uint64_t n, double delta) {
  if (!(delta > 0 && delta < 1)) {
    throw ParameterError("amplification: delta in (0, 1)");
  }
  return std::log(static_cast<double>(n) / std::log(1.0 / delta)) / 2.0;
}

double amplified_epsilon(double eps_local, std::uint64_t n, double delta,
                         double c_amp) {
  if (eps_local < 0) throw ParameterError("amplification: eps_local >= 0");
  if (eps_local > amplification_regime_limit(n, delta)) {
    throw ParameterError(
        "amplification: eps_local exceeds ln(n/ln(1/delta))/2, outside the "
        "amplification regime");
  }
  return c_amp * eps_local * std::exp(eps_local) *
         std::sqrt(std::log(1.0 / delta) / static_cast<double>(n));
}

double invert_amplified_epsilon(double eps_target, std::uint64_t n,
                                double delta, double c_amp) {
  if (!(eps_target > 0)) throw ParameterError("inversion: eps_target > 0");
  const double hi_limit = amplification_regime_limit(n, delta);
  if (hi_limit <= 0) {
    throw ParameterError("inversion: no admissible eps_local for these n, delta");
  }
  if (amplified_epsilon(hi_limit, n, delta, c_amp) <= eps_target) {
    return hi_limit;
  }
  double lo = 0.0, hi = hi_limit;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (amplified_epsilon(mid, n, delta, c_amp) <= eps_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace sdp
