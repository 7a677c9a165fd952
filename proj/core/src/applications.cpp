#include "sdp/applications.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sdp/countmin.hpp"
#include "sdp/error.hpp"
#include "sdp/hadamard.hpp"
#include "sdp/rangequery.hpp"

namespace sdp {

namespace {

// Per-level accuracy bound of the Count-Min estimate, the xi*sqrt(gamma n)
// form with xi chosen for a union bound over all cells and queries.
double cm_error_bound(std::uint64_t n, std::uint64_t domain_size,
                      const CMParams& p, double beta) {
  const double xi =
      std::sqrt(3.0 * std::log(4.0 * static_cast<double>(domain_size) *
                               static_cast<double>(p.buckets) *
                               static_cast<double>(p.rows) / beta));
  return xi * std::sqrt(p.gamma * static_cast<double>(n));
}

}  // namespace

HeavyHitterResult heavy_hitters(const Dataset& dataset, double threshold,
                                const PrivacyParams& privacy,
                                std::uint64_t seed,
                                const HeavyHitterOptions& options) {
  dataset.validate();
  privacy.validate();
  if (threshold <= 0) throw ParameterError("heavy_hitters: threshold > 0");
  const std::uint64_t n = dataset.num_users();
  const std::uint64_t padded = pad_domain(dataset.domain_size);
  const std::uint32_t levels =
      std::max<std::uint32_t>(1, std::countr_zero(padded));

  HeavyHitterResult result;
  result.levels = levels;

  // One Count-Min structure per prefix length, each (eps/L, delta/L)-DP.
  std::vector<CMParams> params(levels);
  std::vector<HashFamily> families;
  std::vector<CMSketch> sketches;
  families.reserve(levels);
  double floor = 0.0;
  for (std::uint32_t i = 0; i < levels; ++i) {
    const std::uint64_t level_domain = 1ULL << (i + 1);
    const CMDerivedParams d = cm_params(
        std::max<std::uint64_t>(n, 1), level_domain, dataset.sparsity,
        privacy.epsilon / levels, privacy.delta / levels, privacy.beta,
        options.c_util);
    CMParams& p = params[i];
    p.n = n;
    p.domain_size = level_domain;
    p.rows = d.rows;
    p.buckets = d.buckets;
    p.k = dataset.sparsity;
    p.gamma = d.gamma;
    p.one_sided = options.one_sided;
    families.emplace_back(p.rows, p.buckets,
                          detail::mix64(seed ^ (0xabcd0000ULL + i)));
    floor = std::max(floor, cm_error_bound(n, level_domain, p, privacy.beta));
  }
  result.per_level_error_floor = floor;
  if (threshold <= 2.0 * floor) {
    result.warning = "threshold " + std::to_string(threshold) +
                     " is at or below twice the per-level error floor " +
                     std::to_string(floor);
    if (options.strict) {
      throw ParameterError("heavy_hitters: " + result.warning);
    }
  }

  for (std::uint32_t i = 0; i < levels; ++i) {
    CMSketchAccumulator acc(params[i], families[i]);
    const std::uint32_t shift = levels - (i + 1);
    for (std::size_t u = 0; u < dataset.users.size(); ++u) {
      std::vector<DomainElement> prefixes;
      prefixes.reserve(dataset.users[u].size());
      for (DomainElement e : dataset.users[u].elements) {
        prefixes.push_back(
            static_cast<DomainElement>(((e - 1) >> shift) + 1));
      }
      acc.add_user(UserInput(std::move(prefixes)),
                   detail::mix64(seed ^ (0x1111ULL + i)), u);
    }
    sketches.push_back(acc.finalize());
  }

  // Decode: expand only surviving prefixes, level by level.
  const std::uint64_t cap = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(4.0 * static_cast<double>(n) / threshold));
  std::vector<std::uint64_t> survivors = {0};  // virtual root prefix
  for (std::uint32_t i = 0; i < levels; ++i) {
    std::vector<std::pair<double, std::uint64_t>> kept;
    for (std::uint64_t s : survivors) {
      for (std::uint64_t child = 2 * s; child <= 2 * s + 1; ++child) {
        ++result.node_expansions;
        const double est =
            query_cm(sketches[i], static_cast<DomainElement>(child + 1),
                     params[i], families[i]);
        if (est >= threshold / 2.0) kept.emplace_back(est, child);
      }
    }
    // Cap survivors per level, largest estimates first, ties by element.
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (kept.size() > cap) kept.resize(cap);
    survivors.clear();
    survivors.reserve(kept.size());
    for (const auto& [est, prefix] : kept) survivors.push_back(prefix);
    if (i + 1 == levels) {
      for (const auto& [est, prefix] : kept) {
        if (prefix + 1 <= dataset.domain_size) {
          result.items.push_back(
              HeavyHitterItem{static_cast<DomainElement>(prefix + 1), est});
        }
      }
    }
  }
  std::sort(result.items.begin(), result.items.end(),
            [](const HeavyHitterItem& a, const HeavyHitterItem& b) {
              if (a.estimate != b.estimate) return a.estimate > b.estimate;
              return a.element < b.element;
            });
  return result;
}

void QuantileSpec::validate() const {
  if (q < 2 || k < 1 || k >= q) {
    throw ParameterError("quantile: need 1 <= k < q");
  }
  if (values.empty()) throw ParameterError("quantile: need n >= 1 values");
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("quantile: values must lie in [0, 1]");
    }
  }
}

std::uint64_t quantile_bucket(double value, std::uint64_t num_buckets) {
  if (value <= 0.0) return 1;
  const std::uint64_t j = static_cast<std::uint64_t>(
      std::ceil(value * static_cast<double>(num_buckets)));
  return std::min<std::uint64_t>(std::max<std::uint64_t>(j, 1), num_buckets);
}

double quantile_objective(const std::vector<double>& values, double y,
                          std::uint32_t k, std::uint32_t q) {
  const double frac = static_cast<double>(k) / static_cast<double>(q);
  double m = 0.0;
  for (double x : values) {
    m += (1.0 - frac) * std::max(y - x, 0.0) + frac * std::max(x - y, 0.0);
  }
  return m;
}

QuantileResult m_estimate_quantile(const QuantileSpec& spec,
                                   const PrivacyParams& privacy,
                                   std::uint64_t seed, bool noiseless) {
  spec.validate();
  privacy.validate();
  const std::uint64_t n = spec.values.size();
  const std::uint64_t num_buckets = n;
  const std::uint64_t padded = pad_domain(num_buckets);

  std::vector<std::vector<DomainElement>> points;
  points.reserve(n);
  for (double v : spec.values) {
    points.push_back({static_cast<DomainElement>(
        quantile_bucket(v, num_buckets))});
  }

  RangeProtocolParams rp;
  rp.n = n;
  rp.per_dim_size = std::max<std::uint64_t>(2, padded);
  rp.dims = 1;
  rp.fo = RangeFO::kCountMin;
  rp.privacy = privacy;
  rp.public_seed = detail::mix64(seed ^ 0x71a9ULL);

  std::unique_ptr<FrequencyOracle> fo =
      noiseless ? build_exact_range_oracle(points, rp)
                : build_range_oracle(points, rp, seed);

  const double target = static_cast<double>(spec.k) * static_cast<double>(n) /
                        static_cast<double>(spec.q);
  QuantileResult out;
  out.num_buckets = num_buckets;
  out.bucket = num_buckets;
  for (std::uint64_t j = 1; j <= num_buckets; ++j) {
    const double count = answer_decomposition(
        *fo, range_decomposition(1, j, rp.per_dim_size));
    if (count >= target) {
      out.bucket = j;
      break;
    }
  }
  out.value = static_cast<double>(out.bucket) /
              static_cast<double>(num_buckets);
  return out;
}

SQResult simulate_sq(const SQSpec<std::int64_t>& spec,
                     const std::vector<std::int64_t>& samples,
                     const PrivacyParams& privacy, std::uint64_t seed) {
  privacy.validate();
  if (spec.predicates.empty()) throw ParameterError("sq: need >= 1 predicate");
  if (spec.sparsity < 1) throw ParameterError("sq: sparsity k >= 1");
  if (samples.empty()) throw ParameterError("sq: need >= 1 sample");
  const std::uint64_t num_queries = spec.predicates.size();
  const std::uint64_t n = samples.size();

  // Exact sparsity check: evaluate every predicate on every sample.
  std::vector<UserInput> inputs;
  inputs.reserve(n);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<DomainElement> satisfied;
    for (std::uint64_t j = 0; j < num_queries; ++j) {
      if (spec.predicates[j](samples[i])) {
        satisfied.push_back(static_cast<DomainElement>(j + 1));
      }
    }
    if (satisfied.size() > spec.sparsity) {
      throw SparsityError("sq: sample " + std::to_string(i + 1) +
                          " satisfies " + std::to_string(satisfied.size()) +
                          " predicates, sparsity bound is " +
                          std::to_string(spec.sparsity));
    }
    inputs.push_back(UserInput(std::move(satisfied)));
  }

  HadParams hp;
  hp.domain_size = pad_domain(std::max<std::uint64_t>(2, num_queries));
  if (spec.sparsity >= hp.domain_size) hp.domain_size *= 2;
  hp.n = n;
  hp.k = spec.sparsity;
  hp.tau = std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(std::ceil(
             std::log2(static_cast<double>(std::max<std::uint64_t>(2, n))))));
  hp.rho = had_rho(privacy.epsilon, privacy.delta, hp.k);

  HadRawAccumulator acc(hp);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (const HadMessage& m : randomize_had(inputs[i], hp, seed, i)) {
      acc.add(m);
    }
  }
  const CountVector estimates = debias_had(acc.raw_counts(), hp);

  SQResult out;
  out.answers.resize(num_queries);
  for (std::uint64_t j = 0; j < num_queries; ++j) {
    out.answers[j] = estimates[j] / static_cast<double>(n);
  }

  // Sample-size shape from the corollary; advisory only.
  const double logterm =
      std::log(static_cast<double>(num_queries) / privacy.beta);
  const double needed =
      logterm / (spec.tolerance * spec.tolerance) +
      static_cast<double>(spec.sparsity) * logterm *
          std::sqrt(std::log(static_cast<double>(spec.sparsity) /
                             (privacy.delta * privacy.epsilon))) /
          (privacy.epsilon * spec.tolerance);
  if (static_cast<double>(n) < needed) {
    out.warning = "n = " + std::to_string(n) +
                  " is below the corollary sample bound ~" +
                  std::to_string(needed);
  }
  return out;
}

}  // namespace sdp
