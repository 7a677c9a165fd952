#include "sdp/baselines.hpp"

#include <cmath>

#include "sdp/error.hpp"

namespace sdp {

DomainElement randomize_rr(DomainElement x, std::uint64_t domain_size,
                           double eps_local, RandomStream& rng) {
  if (x < 1 || x > domain_size) {
    throw DomainError("randomize_rr: element outside [1, B]");
  }
  if (eps_local < 0) throw ParameterError("randomize_rr: eps_local >= 0");
  if (domain_size == 1) return x;
  const double e = std::exp(eps_local);
  const double keep = e / (e + static_cast<double>(domain_size) - 1.0);
  if (rng.bernoulli(keep)) return x;
  const std::uint64_t u = rng.uniform_below(domain_size - 1) + 1;
  return static_cast<DomainElement>(u < x ? u : u + 1);
}

CountVector analyze_rr_counts(const std::vector<std::uint64_t>& raw_counts,
                              std::uint64_t n, std::uint64_t domain_size,
                              double eps_local) {
  if (eps_local <= 0) {
    throw ParameterError("analyze_rr: eps_local must be positive (the "
                         "de-bias divides by e^eps - 1)");
  }
  if (raw_counts.size() != domain_size) {
    throw FormatError("analyze_rr: count vector has wrong length");
  }
  const double e = std::exp(eps_local);
  const double denom = e + static_cast<double>(domain_size) - 1.0;
  const double scale = denom / (e - 1.0);
  const double offset = static_cast<double>(n) / denom;
  CountVector out(domain_size);
  for (std::size_t j = 0; j < domain_size; ++j) {
    out[j] = (static_cast<double>(raw_counts[j]) - offset) * scale;
  }
  return out;
}

CountVector analyze_rr(const RRBatch& batch, std::uint64_t domain_size,
                       double eps_local) {
  std::vector<std::uint64_t> counts(domain_size, 0);
  for (const auto& [z, mult] : batch) {
    if (z < 1 || z > domain_size) {
      throw FormatError("analyze_rr: message outside [1, B]");
    }
    counts[z - 1] += mult;
  }
  return analyze_rr_counts(counts, batch.total_messages(), domain_size,
                           eps_local);
}

BitVector randomize_rappor(DomainElement x, std::uint64_t domain_size,
                           double eps_local, RandomStream& rng) {
  if (x < 1 || x > domain_size) {
    throw DomainError("randomize_rappor: element outside [1, B]");
  }
  if (eps_local < 0) throw ParameterError("randomize_rappor: eps_local >= 0");
  BitVector v(domain_size);
  randomize_rappor_bits(x, domain_size, eps_local, rng,
                        [&](std::uint64_t j) { v.set(j - 1); });
  return v;
}

CountVector analyze_rappor_columns(const std::vector<std::uint64_t>& colsums,
                                   std::uint64_t n, std::uint64_t domain_size,
                                   double eps_local) {
  if (eps_local <= 0) {
    throw ParameterError("analyze_rappor: eps_local must be positive (the "
                         "de-bias divides by e^{eps/2} - 1)");
  }
  if (colsums.size() != domain_size) {
    throw FormatError("analyze_rappor: column sums have wrong length");
  }
  const double e = std::exp(eps_local / 2.0);
  const double scale = (e + 1.0) / (e - 1.0);
  const double offset = static_cast<double>(n) / (1.0 + e);
  CountVector out(domain_size);
  for (std::size_t j = 0; j < domain_size; ++j) {
    out[j] = (static_cast<double>(colsums[j]) - offset) * scale;
  }
  return out;
}

CountVector analyze_rappor(const RapporBatch& batch,
                           std::uint64_t domain_size, double eps_local) {
  std::vector<std::uint64_t> colsums(domain_size, 0);
  for (const auto& [v, mult] : batch) {
    if (v.size() != domain_size) {
      throw FormatError("analyze_rappor: bit vector has wrong length");
    }
    v.for_each_set([&](std::uint64_t i) { colsums[i] += mult; });
  }
  return analyze_rappor_columns(colsums, batch.total_messages(), domain_size,
                                eps_local);
}

}  // namespace sdp
