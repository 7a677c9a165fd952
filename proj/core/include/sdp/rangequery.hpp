#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sdp/countmin.hpp"
#include "sdp/frequency_oracle.hpp"
#include "sdp/hadamard.hpp"
#include "sdp/privacy.hpp"
#include "sdp/rangetree.hpp"

namespace sdp {

enum class RangeFO { kCountMin, kHadamard };

// Matrix-mechanism protocol over the dyadic range tree, with either
// frequency oracle behind it. The user sparsity k equals the tree
// sensitivity (1 + log2 B0)^d; strict-paper mode budgets the Hadamard
// route with the looser (log2 2B)^d instead.
struct RangeProtocolParams {
  std::uint64_t n = 0;
  std::uint64_t per_dim_size = 2;  // B0, a power of two
  std::uint32_t dims = 1;
  RangeFO fo = RangeFO::kCountMin;
  PrivacyParams privacy;
  bool strict_paper = false;
  bool one_sided = false;
  std::uint64_t public_seed = 0;
  double c_util = 1.0;

  void validate() const;
  std::uint64_t flat_domain() const;  // B0^d
  std::uint32_t sparsity() const;     // k fed to the FO
  HadParams had_params() const;
  CMParams cm_protocol_params() const;
  HashFamily make_family() const;
};

// R^matrix: the FO randomizer applied to the column support of the
// user's point.
std::vector<CMMessage> randomize_range_cm(
    const std::vector<DomainElement>& point, const RangeProtocolParams& rp,
    const HashFamily& family, std::uint64_t seed, std::uint64_t user_id);
std::vector<HadMessage> randomize_range_had(
    const std::vector<DomainElement>& point, const RangeProtocolParams& rp,
    std::uint64_t seed, std::uint64_t user_id);

// A^matrix per query: signed sparse inner product of the decomposition
// with FO estimates; time O(|decomposition| x FO query time).
double answer_decomposition(const FrequencyOracle& fo,
                            const SignedSparseVector& decomposition);

std::vector<double> analyze_range(const FrequencyOracle& fo,
                                  const std::vector<RangeQuery>& queries,
                                  std::uint64_t per_dim_size,
                                  std::uint32_t dims);

// Builds the FO for a whole dataset of points through the streaming
// accumulators; same counts as randomize/shuffle/analyze.
std::unique_ptr<FrequencyOracle> build_range_oracle(
    const std::vector<std::vector<DomainElement>>& points,
    const RangeProtocolParams& rp, std::uint64_t seed);

// Noiseless oracle: exact M * hist through column supports.
std::unique_ptr<FrequencyOracle> build_exact_range_oracle(
    const std::vector<std::vector<DomainElement>>& points,
    const RangeProtocolParams& rp);

// Brute-force point-in-box counts (test and truth oracle).
std::vector<double> exact_range_counts(
    const std::vector<std::vector<DomainElement>>& points,
    const std::vector<RangeQuery>& queries);

}  // namespace sdp
