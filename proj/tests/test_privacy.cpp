#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sdp/error.hpp"
#include "sdp/privacy.hpp"

using namespace sdp;

TEST_CASE("had_rho at the ln(e/delta)=2 points") {
  // eps=1, delta=1/e: 36 * ln(e / e^-1) = 36 * 2 = 72.
  CHECK(had_rho(1.0, std::exp(-1.0), 1) == 72);
  // eps=1, delta = e*e^-2 = e^-1: same argument, recomputed.
  CHECK(had_rho(1.0, std::exp(1.0) * std::exp(-2.0), 1) == 72);
}

TEST_CASE("had_rho grows at least fourfold in k") {
  const double delta = 1e-4;
  const std::uint64_t r1 = had_rho(1.0, delta, 1);
  const std::uint64_t r2 = had_rho(1.0, delta, 2);
  CHECK(r2 >= 4 * (r1 - 1));
}

TEST_CASE("had_rho monotone in eps and delta") {
  std::uint64_t prev = 0;
  for (double eps : {1.0, 0.5, 0.25, 0.1}) {
    const std::uint64_t r = had_rho(eps, 1e-6, 1);
    CHECK(r >= prev);
    prev = r;
  }
  prev = 0;
  for (double delta : {1e-2, 1e-4, 1e-8}) {
    const std::uint64_t r = had_rho(0.5, delta, 1);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("had_rho rejects bad parameters") {
  CHECK_THROWS_AS(had_rho(0.0, 0.5, 1), ParameterError);
  CHECK_THROWS_AS(had_rho(0.5, 0.0, 1), ParameterError);
  CHECK_THROWS_AS(had_rho(0.5, 0.5, 0), ParameterError);
}

TEST_CASE("cm_params boundary tau and bucket count") {
  const CMDerivedParams d = cm_params(500, 2, 1, 1.0, 1e-6, 1.0);
  CHECK(d.rows == 2);  // ceil(log2(4))
  CHECK(d.buckets == 1000);
}

TEST_CASE("cm_params privacy floor matches the lemma formula") {
  // tau = 11 via B=1024, beta=1; privacy term dominates the ln n floor.
  const std::uint64_t n = 10000;
  const CMDerivedParams d = cm_params(n, 1024, 1, 1.0, 1e-6, 1.0);
  REQUIRE(d.rows == 11);
  const double expected_gamma_n = 90.0 * 121.0 * std::log(2.0 * 11.0 / 1e-6);
  CHECK(d.gamma_formula * static_cast<double>(n) ==
        doctest::Approx(expected_gamma_n).epsilon(1e-12));
  CHECK(d.gamma_clamped);
  CHECK(d.gamma == 1.0);
}

TEST_CASE("cm_params monotone: shrinking eps or delta never shrinks gamma*n") {
  double prev = 0.0;
  for (double eps : {1.0, 0.5, 0.2}) {
    const CMDerivedParams d = cm_params(100000, 64, 1, eps, 1e-6, 0.2);
    CHECK(d.gamma_formula >= prev);
    prev = d.gamma_formula;
  }
  prev = 0.0;
  for (double delta : {1e-3, 1e-6, 1e-9}) {
    const CMDerivedParams d = cm_params(100000, 64, 1, 1.0, delta, 0.2);
    CHECK(d.gamma_formula >= prev);
    prev = d.gamma_formula;
  }
}

TEST_CASE("binomial smoothness bound closed forms") {
  SUBCASE("alpha = 0 gives (0, 2)") {
    const SmoothnessReport r = binomial_smoothness_bound(1000, 0.1, 0.0, 0);
    CHECK(r.epsilon_bound == 0.0);
    CHECK(r.delta_bound == doctest::Approx(2.0));
  }
  SUBCASE("alpha = 1 is out of range") {
    CHECK_THROWS_AS(binomial_smoothness_bound(1000, 0.1, 1.0, 1),
                    ParameterError);
  }
  SUBCASE("plugging the lemma closed forms") {
    const std::uint64_t n = 10000;
    const double gamma = 0.01, alpha = 0.5;
    const SmoothnessReport r = binomial_smoothness_bound(n, gamma, alpha, 25);
    const double gn = gamma * static_cast<double>(n);
    CHECK(r.epsilon_bound == doctest::Approx(std::log(1.5 / 0.5)));
    CHECK(r.delta_bound ==
          doctest::Approx(std::exp(-alpha * alpha * gn / 8.0) +
                          std::exp(-alpha * alpha * gn / (8.0 + 2 * alpha))));
  }
  SUBCASE("k above alpha gamma n / 2 is rejected") {
    CHECK_THROWS_AS(binomial_smoothness_bound(100, 0.1, 0.5, 10),
                    ParameterError);
  }
}

namespace {

// Enumeration oracle for the exact smoothness of Bin(n, gamma), straight
// from the definition, in plain double arithmetic (small n only).
double smoothness_oracle(std::uint64_t n, double gamma, double eps,
                         std::int64_t k) {
  std::vector<double> pmf(n + 1);
  for (std::uint64_t y = 0; y <= n; ++y) {
    double v = 1.0;
    for (std::uint64_t i = 0; i < y; ++i) {
      v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    pmf[y] = v * std::pow(gamma, static_cast<double>(y)) *
             std::pow(1.0 - gamma, static_cast<double>(n - y));
  }
  double worst = 0.0;
  for (std::int64_t kp = -k; kp <= k; ++kp) {
    if (kp == 0) continue;
    double tail = 0.0;
    for (std::int64_t y = 0; y <= static_cast<std::int64_t>(n); ++y) {
      const std::int64_t ys = y + kp;
      bool exceeds;
      if (ys < 0 || ys > static_cast<std::int64_t>(n)) {
        exceeds = true;
      } else {
        exceeds = pmf[y] >= std::exp(std::abs(static_cast<double>(kp)) * eps) *
                                pmf[ys];
      }
      if (exceeds) tail += pmf[y];
    }
    worst = std::max(worst, tail);
  }
  return worst;
}

}  // namespace

TEST_CASE("binomial_smoothness_exact") {
  SUBCASE("k = 0 has no shifts") {
    CHECK(binomial_smoothness_exact(1000, 0.1, 0.5, 0) == 0.0);
  }
  SUBCASE("n=10 gamma=0.5 eps=10: only the extreme point exceeds") {
    const double v = binomial_smoothness_exact(10, 0.5, 10.0, 1);
    CHECK(v == doctest::Approx(1.0 / 1024.0).epsilon(1e-9));
    CHECK(v == doctest::Approx(smoothness_oracle(10, 0.5, 10.0, 1)));
  }
  SUBCASE("matches the enumeration oracle on small cases") {
    for (std::uint64_t n : {10ULL, 25ULL, 60ULL}) {
      for (double gamma : {0.1, 0.3, 0.5}) {
        for (double eps : {0.2, 0.7, 2.0}) {
          const double got = binomial_smoothness_exact(n, gamma, eps, 2);
          const double want = smoothness_oracle(n, gamma, eps, 2);
          CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
      }
    }
  }
  SUBCASE("exact level is below the analytic bound on a grid") {
    for (std::uint64_t n : {1000ULL, 5000ULL}) {
      for (double gamma : {0.05, 0.2}) {
        for (double alpha : {0.4, 0.8}) {
          const std::uint64_t k = std::max<std::uint64_t>(
              1, static_cast<std::uint64_t>(alpha * gamma *
                                            static_cast<double>(n) / 2.0) /
                     4);
          const SmoothnessReport bound =
              binomial_smoothness_bound(n, gamma, alpha, k);
          const double exact =
              binomial_smoothness_exact(n, gamma, bound.epsilon_bound, k);
          CHECK(exact <= bound.delta_bound + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("noise_mechanism_params") {
  SUBCASE("sensitivity 1 is the identity") {
    const PerCoordinateBudget b = noise_mechanism_params(1, 1, 0.7, 0.01);
    CHECK(b.epsilon == 0.7);
    CHECK(b.delta == 0.01);
  }
  SUBCASE("divides both budgets") {
    const PerCoordinateBudget b = noise_mechanism_params(10, 1, 1.0, 0.1);
    CHECK(b.epsilon == doctest::Approx(0.1));
    CHECK(b.delta == doctest::Approx(0.01));
  }
  SUBCASE("count-min sensitivity k*tau") {
    const std::uint64_t k = 3, tau = 11;
    const PerCoordinateBudget b =
        noise_mechanism_params(k * tau, k, 1.0, 1e-6);
    CHECK(b.epsilon == doctest::Approx(1.0 / 33.0));
    CHECK(b.delta == doctest::Approx(1e-6 / 33.0));
  }
  SUBCASE("zero sensitivity is rejected") {
    CHECK_THROWS_AS(noise_mechanism_params(0, 1, 1.0, 0.1), ParameterError);
  }
  SUBCASE("certified smoothness scales back up through the mechanism") {
    // A distribution passing the exact oracle at (eps/Delta, k) certifies
    // (eps, delta_exact * Delta) for the Delta-sensitive k-incremental
    // mechanism.
    const std::uint64_t delta_sens = 6, k = 2, n = 2000;
    const double gamma = 0.2, eps = 1.2;
    const PerCoordinateBudget per =
        noise_mechanism_params(delta_sens, k, eps, 0.5);
    const double delta_exact =
        binomial_smoothness_exact(n, gamma, per.epsilon, k);
    CHECK(delta_exact * static_cast<double>(delta_sens) <= 0.5);
  }
}

TEST_CASE("amplified_epsilon") {
  SUBCASE("zero local epsilon amplifies to zero") {
    CHECK(amplified_epsilon(0.0, 10000, 1e-6) == 0.0);
  }
  SUBCASE("linear in c_amp") {
    const double e1 = amplified_epsilon(1.0, 10000, 1e-6, 1.0);
    const double e2 = amplified_epsilon(1.0, 10000, 1e-6, 2.0);
    CHECK(e2 == doctest::Approx(2.0 * e1));
  }
  SUBCASE("direct evaluation at ln 2") {
    const double el = std::log(2.0);
    const double want =
        el * 2.0 * std::sqrt(std::log(1e6) / 10000.0);
    CHECK(amplified_epsilon(el, 10000, 1e-6) == doctest::Approx(want));
  }
  SUBCASE("out of regime throws") {
    const double lim = amplification_regime_limit(10000, 1e-6);
    CHECK_THROWS_AS(amplified_epsilon(lim + 0.1, 10000, 1e-6),
                    ParameterError);
  }
}

TEST_CASE("invert_amplified_epsilon round trip") {
  const double target = 1.0;
  const double el = invert_amplified_epsilon(target, 100000, 1e-6);
  CHECK(el > 0.0);
  const double back = amplified_epsilon(el, 100000, 1e-6);
  CHECK(back <= target + 1e-9);
  CHECK(back == doctest::Approx(target).epsilon(1e-6));
}
