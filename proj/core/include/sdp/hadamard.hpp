#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdp/domain.hpp"
#include "sdp/frequency_oracle.hpp"
#include "sdp/rng.hpp"
#include "sdp/shuffle.hpp"

namespace sdp {

struct HadParams {
  std::uint64_t n = 0;         // number of users
  std::uint64_t domain_size = 0;  // B, a power of two
  std::uint32_t tau = 1;       // symbols per message
  std::uint64_t rho = 0;       // blanket messages per user
  std::uint32_t k = 1;         // elements per user after augmentation

  void validate() const;
  std::uint32_t symbol_bits() const;  // ceil(log2(2B))
};

// One message: tau symbols, each in [1, 2B].
using HadMessage = std::vector<std::uint32_t>;

template <>
struct BatchHash<HadMessage> {
  std::size_t operator()(const HadMessage& m) const {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::uint32_t s : m) h = detail::mix64(h ^ s);
    return static_cast<std::size_t>(h);
  }
};

using HadBatch = ShuffledBatch<HadMessage>;

// Membership in the Hadamard codeword H_{2B,j}: row j+1 of the 2B x 2B
// Hadamard matrix is +1 at column a iff popcount(j AND (a-1)) is even.
// Valid for j in [1, 2B-1] (row 1 is all ones and unusable).
bool had_member(std::uint64_t j, std::uint64_t a, std::uint64_t domain_size);

// k + rho messages for one user: per (augmented) element j, tau uniform
// independent members of H_{2B,j}; then rho tuples of tau uniform symbols
// from [2B]. Payload and blanket use independent role-split streams.
std::vector<HadMessage> randomize_had(const UserInput& input,
                                      const HadParams& p, std::uint64_t seed,
                                      std::uint64_t user_id);

// Streaming accumulator for the raw membership counts. Per message it
// enumerates the kernel of the tau x log(2B) bit matrix stacked from the
// symbols (Gaussian elimination over F2), so a message contributes to
// raw[j] exactly when all its symbols lie in H_{2B,j}.
class HadRawAccumulator {
 public:
  explicit HadRawAccumulator(const HadParams& p);

  void add(const HadMessage& message, std::uint64_t multiplicity = 1);
  void add_batch(const HadBatch& batch);

  const std::vector<std::uint64_t>& raw_counts() const { return raw_; }
  std::uint64_t messages_seen() const { return messages_; }

 private:
  HadParams params_;
  std::vector<std::uint64_t> raw_;  // index j-1 for j in [1, B]
  std::uint64_t messages_ = 0;
};

// Raw membership counts per j in [1, B], by quadratic scan (reference).
std::vector<std::uint64_t> raw_had_counts(const HadBatch& batch,
                                          const HadParams& p);

// All j in [1, 2B-1] whose codeword contains every symbol of the message
// (the nonzero kernel elements of its bit matrix), ascending.
std::vector<std::uint32_t> had_kernel_elements(const HadMessage& message,
                                               const HadParams& p);

// De-bias: x_j = (raw_j - (rho + k) n 2^{-tau}) / (1 - 2^{-tau}).
// Estimates may be negative; no clamping.
CountVector debias_had(const std::vector<std::uint64_t>& raw,
                       const HadParams& p);

// Reference analyzer: membership scan over every (message, j) pair.
CountVector analyze_had(const HadBatch& batch, const HadParams& p);

// Kernel-enumeration analyzer; identical output to analyze_had.
CountVector analyze_had_fast(const HadBatch& batch, const HadParams& p);

// Oracle holding the raw tuple collection; query(j) scans all messages,
// O(m tau) per query, and equals analyze_had(batch)[j] exactly.
class HadOracle final : public FrequencyOracle {
 public:
  HadOracle(const HadBatch& batch, const HadParams& p);

  std::uint64_t domain_size() const override { return params_.domain_size; }
  double query(DomainElement j) const override;

 private:
  HadParams params_;
  std::vector<std::pair<HadMessage, std::uint64_t>> messages_;
};

HadOracle build_oracle_had(const HadBatch& batch, const HadParams& p);

// Wire form: tau symbols of symbol_bits() each (value-1), little-endian
// bit packing, hex encoded.
std::string had_message_to_hex(const HadMessage& m, const HadParams& p);
HadMessage had_message_from_hex(const std::string& hex, const HadParams& p);

}  // namespace sdp
