#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sdp/domain.hpp"
#include "sdp/privacy.hpp"

namespace sdp {

// ---- Heavy hitters via a binary prefix tree of Count-Min structures ----

struct HeavyHitterItem {
  DomainElement element = 0;
  double estimate = 0.0;
};

struct HeavyHitterResult {
  std::vector<HeavyHitterItem> items;  // estimate descending, ties by element
  std::uint64_t node_expansions = 0;
  std::uint32_t levels = 0;
  double per_level_error_floor = 0.0;
  std::string warning;
};

struct HeavyHitterOptions {
  bool strict = false;     // refuse instead of warn when threshold too low
  bool one_sided = false;
  double c_util = 1.0;
};

// One (eps/L, delta/L)-DP Count-Min structure per binary-prefix length;
// every user inserts all L prefixes of each of its elements. The decoder
// keeps length-i prefixes with estimate >= threshold/2, capped at
// 4n/threshold survivors per level, and expands only those.
HeavyHitterResult heavy_hitters(const Dataset& dataset, double threshold,
                                const PrivacyParams& privacy,
                                std::uint64_t seed,
                                const HeavyHitterOptions& options = {});

// ---- M-estimation of quantiles via prefix range counts ----

struct QuantileSpec {
  std::uint32_t k = 1;  // k-th q-quantile; median is k=1, q=2
  std::uint32_t q = 2;
  std::vector<double> values;  // n reals in [0, 1]

  void validate() const;
};

struct QuantileResult {
  double value = 0.0;       // j*/B
  std::uint64_t bucket = 0; // j*
  std::uint64_t num_buckets = 0;
};

// Buckets values into B = n intervals I_j = [(j-1)/B, j/B] (value 1.0
// maps to bucket B; boundary ties resolve to the lower bucket), answers
// prefix queries [1, j] through the range-tree protocol, and returns the
// smallest j whose noisy prefix count reaches k n / q.
QuantileResult m_estimate_quantile(const QuantileSpec& spec,
                                   const PrivacyParams& privacy,
                                   std::uint64_t seed, bool noiseless = false);

// The convex objective the k-th q-quantile minimizes; exact evaluation
// used by tests and reports.
double quantile_objective(const std::vector<double>& values, double y,
                          std::uint32_t k, std::uint32_t q);

std::uint64_t quantile_bucket(double value, std::uint64_t num_buckets);

// ---- k-sparse non-adaptive SQ simulation over the Hadamard protocol ----

template <typename Sample>
struct SQSpec {
  std::vector<std::function<bool(const Sample&)>> predicates;
  std::uint32_t sparsity = 1;  // k: no sample satisfies more than k
  double tolerance = 0.1;
};

struct SQResult {
  std::vector<double> answers;  // one per predicate, estimates of E[q_j]
  std::string warning;          // set when n is below the corollary bound
};

SQResult simulate_sq(const SQSpec<std::int64_t>& spec,
                     const std::vector<std::int64_t>& samples,
                     const PrivacyParams& privacy, std::uint64_t seed);

}  // namespace sdp
