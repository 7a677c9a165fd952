#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sdp/domain.hpp"
#include "sdp/frequency_oracle.hpp"
#include "sdp/rng.hpp"
#include "sdp/shuffle.hpp"

namespace sdp {

struct CMParams {
  std::uint64_t n = 0;
  std::uint64_t domain_size = 0;  // B
  std::uint32_t rows = 1;         // tau
  std::uint64_t buckets = 1;      // s, per row
  std::uint32_t k = 1;
  double gamma = 0.0;             // per-cell Bernoulli blanket rate
  bool one_sided = false;         // skip the gamma*n subtraction on query

  void validate() const;
};

// Pairwise independent multiply-add family over the Mersenne prime
// 2^61 - 1: h_t(j) = ((a_t j + b_t) mod p) mod s, mapped into [1, s].
class HashFamily {
 public:
  HashFamily(std::uint32_t rows, std::uint64_t buckets, std::uint64_t seed);

  // Explicit coefficients (a_t in [1, p-1], b_t in [0, p-1]).
  HashFamily(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b,
             std::uint64_t buckets);

  std::uint64_t eval(std::uint32_t t, DomainElement j) const;  // t in [1, tau]

  std::uint32_t rows() const { return static_cast<std::uint32_t>(a_.size()); }
  std::uint64_t buckets() const { return buckets_; }
  std::uint64_t seed() const { return seed_; }

  static constexpr std::uint64_t kPrime = (1ULL << 61) - 1;

 private:
  std::vector<std::uint64_t> a_, b_;
  std::uint64_t buckets_;
  std::uint64_t seed_;
};

inline std::uint64_t hash_eval(const HashFamily& family, std::uint32_t t,
                               DomainElement j) {
  return family.eval(t, j);
}

struct CMMessage {
  std::uint32_t row = 0;      // in [1, tau]
  std::uint64_t bucket = 0;   // in [1, s]

  bool operator==(const CMMessage&) const = default;
};

inline std::uint64_t hash_value(const CMMessage& m) {
  return detail::mix64((static_cast<std::uint64_t>(m.row) << 40) ^ m.bucket);
}

using CMBatch = ShuffledBatch<CMMessage>;

struct CMSketch {
  std::uint32_t rows = 0;
  std::uint64_t buckets = 0;
  std::vector<std::uint64_t> table;  // row-major, rows x buckets

  std::uint64_t& at(std::uint32_t t, std::uint64_t ell) {
    return table[static_cast<std::size_t>(t - 1) * buckets + (ell - 1)];
  }
  std::uint64_t at(std::uint32_t t, std::uint64_t ell) const {
    return table[static_cast<std::size_t>(t - 1) * buckets + (ell - 1)];
  }

  void merge(const CMSketch& other);
  std::uint64_t total() const;
};

// Payload pair (t, h_t(j)) per element and row, plus an independent
// Ber(gamma) inclusion of every cell (t, ell), sampled with geometric
// skips so the work is O(k tau + gamma s tau).
std::vector<CMMessage> randomize_cm(const UserInput& input, const CMParams& p,
                                    const HashFamily& family,
                                    std::uint64_t seed, std::uint64_t user_id);

CMSketch analyze_cm(const CMBatch& batch, const CMParams& p);

// Q^CM. Two-sided: max(min_t C[t, h_t(j)] - gamma n, 0). One-sided mode
// drops the subtraction and never underestimates the true count.
double query_cm(const CMSketch& sketch, DomainElement j, const CMParams& p,
                const HashFamily& family);

// Builds the sketch user by user without materializing the message
// multiset; cell-exact match with the randomize/shuffle/analyze pipeline.
// Ber(1) blanket (clamped gamma) is a point mass: every user increments
// every cell, so it is applied in closed form at finalize time.
class CMSketchAccumulator {
 public:
  CMSketchAccumulator(const CMParams& p, const HashFamily& family);

  void add_user(const UserInput& input, std::uint64_t seed,
                std::uint64_t user_id);
  CMSketch finalize();

  std::uint64_t messages_emitted() const { return messages_; }

 private:
  CMParams params_;
  const HashFamily* family_;
  CMSketch sketch_;
  std::uint64_t users_seen_ = 0;
  std::uint64_t messages_ = 0;
  bool finalized_ = false;
};

class CMOracle final : public FrequencyOracle {
 public:
  CMOracle(CMSketch sketch, CMParams params, HashFamily family);

  std::uint64_t domain_size() const override { return params_.domain_size; }
  double query(DomainElement j) const override;  // O(tau)

  const CMSketch& sketch() const { return sketch_; }

 private:
  CMSketch sketch_;
  CMParams params_;
  HashFamily family_;
};

// Dump format: one header line "tau s gamma n", then one row of decimal
// counters per line.
void write_sketch(std::ostream& out, const CMSketch& sketch,
                  const CMParams& p);
CMSketch read_sketch(std::istream& in, CMParams* p_out);

}  // namespace sdp
