#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sdp/domain.hpp"
#include "sdp/rng.hpp"
#include "sdp/shuffle.hpp"

namespace sdp {

// ---- B-randomized response (single message per user) ----

// Returns x with probability e^{eps_local} / (e^{eps_local} + B - 1),
// else a uniform element of [B] \ {x}.
DomainElement randomize_rr(DomainElement x, std::uint64_t domain_size,
                           double eps_local, RandomStream& rng);

using RRBatch = ShuffledBatch<DomainElement>;

// De-biased unnormalized counts:
// x_j = (count_j - n / (e^eps + B - 1)) * (e^eps + B - 1) / (e^eps - 1).
CountVector analyze_rr(const RRBatch& batch, std::uint64_t domain_size,
                       double eps_local);
CountVector analyze_rr_counts(const std::vector<std::uint64_t>& raw_counts,
                              std::uint64_t n, std::uint64_t domain_size,
                              double eps_local);

// ---- B-RAPPOR (one B-bit vector per user) ----

// Fixed-size bit vector message.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::uint64_t size)
      : size_(size), words_((size + 63) / 64, 0) {}

  std::uint64_t size() const { return size_; }
  bool get(std::uint64_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }
  void set(std::uint64_t i) { words_[i >> 6] |= 1ULL << (i & 63); }
  void clear(std::uint64_t i) { words_[i >> 6] &= ~(1ULL << (i & 63)); }

  // Applies fn to the index of every set bit, ascending.
  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t word = words_[w];
      while (word != 0) {
        const int b = std::countr_zero(word);
        fn(static_cast<std::uint64_t>(w) * 64 + b);
        word &= word - 1;
      }
    }
  }

  bool operator==(const BitVector&) const = default;
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::uint64_t hash_value(const BitVector& v) {
  std::uint64_t h = detail::mix64(v.size());
  for (std::uint64_t w : v.words()) h = detail::mix64(h ^ w);
  return h;
}

using RapporBatch = ShuffledBatch<BitVector>;

// B independent bits; bit j matches the one-hot encoding of x with
// probability e^{eps_local/2} / (1 + e^{eps_local/2}). Off-position bits
// are skip-sampled, so the cost is O(1 + B / (1 + e^{eps_local/2})).
BitVector randomize_rappor(DomainElement x, std::uint64_t domain_size,
                           double eps_local, RandomStream& rng);

// Streaming form: fn(j) is called once per set bit, avoiding the vector.
// Draws the same randomness as randomize_rappor.
template <typename Fn>
void randomize_rappor_bits(DomainElement x, std::uint64_t domain_size,
                           double eps_local, RandomStream& rng, Fn&& fn) {
  const double p_match = 1.0 / (1.0 + std::exp(-eps_local / 2.0));
  const double q_flip = 1.0 - p_match;
  // Positions != x, i in [0, B-2] mapped around x.
  auto position = [&](std::uint64_t i) { return i < x - 1 ? i + 1 : i + 2; };
  if (q_flip >= 1.0) {
    for (std::uint64_t i = 0; i + 1 < domain_size; ++i) fn(position(i));
  } else if (q_flip > 0.0) {
    std::uint64_t i = rng.geometric_skip(q_flip);
    while (i + 1 < domain_size) {
      fn(position(i));
      const std::uint64_t skip = rng.geometric_skip(q_flip);
      if (domain_size - 1 - i <= skip) break;
      i += skip + 1;
    }
  }
  if (rng.bernoulli(p_match)) fn(static_cast<std::uint64_t>(x));
}

// De-biased unnormalized counts:
// x_j = (colsum_j - n / (1 + e^{eps/2})) * (e^{eps/2} + 1) / (e^{eps/2} - 1).
CountVector analyze_rappor(const RapporBatch& batch, std::uint64_t domain_size,
                           double eps_local);
CountVector analyze_rappor_columns(const std::vector<std::uint64_t>& colsums,
                                   std::uint64_t n, std::uint64_t domain_size,
                                   double eps_local);

}  // namespace sdp
