#include "sdp/rangequery.hpp"

#include <bit>
#include <cmath>

#include "sdp/error.hpp"

namespace sdp {

void RangeProtocolParams::validate() const {
  if (per_dim_size < 2 || !std::has_single_bit(per_dim_size)) {
    throw ParameterError("range protocol: B0 must be a power of two >= 2");
  }
  if (dims < 1) throw ParameterError("range protocol: d >= 1");
  privacy.validate();
  if (flat_domain() > (1ULL << 32)) {
    throw ParameterError("range protocol: B0^d too large");
  }
}

std::uint64_t RangeProtocolParams::flat_domain() const {
  std::uint64_t b = 1;
  for (std::uint32_t p = 0; p < dims; ++p) {
    if (b > (1ULL << 60) / per_dim_size) {
      throw ParameterError("range protocol: B0^d overflows");
    }
    b *= per_dim_size;
  }
  return b;
}

std::uint32_t RangeProtocolParams::sparsity() const {
  const std::uint32_t log_b0 =
      static_cast<std::uint32_t>(std::countr_zero(per_dim_size));
  double base = 1.0 + log_b0;
  if (strict_paper && fo == RangeFO::kHadamard) {
    // Strict mode: the looser (log2 2B)^d budget instead of the tight
    // per-dimension product.
    base = 1.0 + static_cast<double>(dims) * log_b0;
  }
  double k = 1.0;
  for (std::uint32_t p = 0; p < dims; ++p) k *= base;
  if (k > 4e9) throw ParameterError("range protocol: sparsity k overflows");
  return static_cast<std::uint32_t>(k);
}

HadParams RangeProtocolParams::had_params() const {
  HadParams hp;
  hp.n = n;
  hp.domain_size = flat_domain();
  hp.k = sparsity();
  hp.tau = std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(
             std::ceil(std::log2(static_cast<double>(std::max<std::uint64_t>(
                 2, n))))));
  hp.rho = had_rho(privacy.epsilon, privacy.delta, hp.k);
  return hp;
}

CMParams RangeProtocolParams::cm_protocol_params() const {
  const std::uint32_t k = sparsity();
  const CMDerivedParams d = cm_params(n, flat_domain(), k, privacy.epsilon,
                                      privacy.delta, privacy.beta, c_util);
  CMParams p;
  p.n = n;
  p.domain_size = flat_domain();
  p.rows = d.rows;
  p.buckets = d.buckets;
  p.k = k;
  p.gamma = d.gamma;
  p.one_sided = one_sided;
  return p;
}

HashFamily RangeProtocolParams::make_family() const {
  const CMParams p = cm_protocol_params();
  return HashFamily(p.rows, p.buckets, public_seed);
}

namespace {

UserInput support_input(const std::vector<DomainElement>& point,
                        const RangeProtocolParams& rp) {
  const std::vector<std::uint64_t> support =
      column_support_d(point, rp.per_dim_size, rp.dims);
  if (support.size() > rp.sparsity()) {
    throw SparsityError("range randomizer: support exceeds configured k");
  }
  std::vector<DomainElement> elems;
  elems.reserve(support.size());
  for (std::uint64_t idx : support) {
    elems.push_back(static_cast<DomainElement>(idx));
  }
  return UserInput(std::move(elems));
}

}  // namespace

std::vector<CMMessage> randomize_range_cm(
    const std::vector<DomainElement>& point, const RangeProtocolParams& rp,
    const HashFamily& family, std::uint64_t seed, std::uint64_t user_id) {
  return randomize_cm(support_input(point, rp), rp.cm_protocol_params(),
                      family, seed, user_id);
}

std::vector<HadMessage> randomize_range_had(
    const std::vector<DomainElement>& point, const RangeProtocolParams& rp,
    std::uint64_t seed, std::uint64_t user_id) {
  return randomize_had(support_input(point, rp), rp.had_params(), seed,
                       user_id);
}

double answer_decomposition(const FrequencyOracle& fo,
                            const SignedSparseVector& decomposition) {
  double sum = 0.0;
  for (const auto& [idx, sign] : decomposition.entries) {
    sum += static_cast<double>(sign) *
           fo.query(static_cast<DomainElement>(idx));
  }
  return sum;
}

std::vector<double> analyze_range(const FrequencyOracle& fo,
                                  const std::vector<RangeQuery>& queries,
                                  std::uint64_t per_dim_size,
                                  std::uint32_t dims) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const RangeQuery& q : queries) {
    out.push_back(answer_decomposition(
        fo, range_decomposition_d(q, per_dim_size, dims)));
  }
  return out;
}

namespace {

class HadRawOracle final : public FrequencyOracle {
 public:
  HadRawOracle(std::vector<std::uint64_t> raw, const HadParams& p)
      : params_(p), estimates_(debias_had(raw, p)) {}

  std::uint64_t domain_size() const override { return params_.domain_size; }
  double query(DomainElement j) const override {
    check_domain(j);
    return estimates_[j - 1];
  }

 private:
  HadParams params_;
  CountVector estimates_;
};

}  // namespace

std::unique_ptr<FrequencyOracle> build_range_oracle(
    const std::vector<std::vector<DomainElement>>& points,
    const RangeProtocolParams& rp, std::uint64_t seed) {
  rp.validate();
  if (rp.fo == RangeFO::kCountMin) {
    const CMParams p = rp.cm_protocol_params();
    const HashFamily family = rp.make_family();
    CMSketchAccumulator acc(p, family);
    for (std::size_t i = 0; i < points.size(); ++i) {
      acc.add_user(support_input(points[i], rp), seed, i);
    }
    return std::make_unique<CMOracle>(acc.finalize(), p, family);
  }
  const HadParams p = rp.had_params();
  HadRawAccumulator acc(p);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const HadMessage& m : randomize_had(support_input(points[i], rp), p,
                                             seed, i)) {
      acc.add(m);
    }
  }
  return std::make_unique<HadRawOracle>(acc.raw_counts(), p);
}

std::unique_ptr<FrequencyOracle> build_exact_range_oracle(
    const std::vector<std::vector<DomainElement>>& points,
    const RangeProtocolParams& rp) {
  rp.validate();
  const std::uint64_t b = rp.flat_domain();
  std::vector<double> y(b, 0.0);
  for (const auto& point : points) {
    for (std::uint64_t idx :
         column_support_d(point, rp.per_dim_size, rp.dims)) {
      y[idx - 1] += 1.0;
    }
  }
  return std::make_unique<ExactOracle>(std::move(y));
}

std::vector<double> exact_range_counts(
    const std::vector<std::vector<DomainElement>>& points,
    const std::vector<RangeQuery>& queries) {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const RangeQuery& q : queries) {
    double count = 0.0;
    for (const auto& point : points) {
      bool inside = point.size() == q.lo.size();
      for (std::size_t p = 0; inside && p < point.size(); ++p) {
        inside = point[p] >= q.lo[p] && point[p] <= q.hi[p];
      }
      if (inside) count += 1.0;
    }
    out.push_back(count);
  }
  return out;
}

}  // namespace sdp
