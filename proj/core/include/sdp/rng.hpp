#pragma once

#include <cmath>
#include <cstdint>

namespace sdp {

// Role labels splitting one experiment seed into independent-behaving
// streams. Payload randomness is private per user; hash seeds are public.
enum class StreamRole : std::uint64_t {
  kPayload = 1,
  kBlanket = 2,
  kDataGen = 3,
  kHash = 4,
  kShuffle = 5,
};

namespace detail {

// splitmix64 finalizer. Stateless, invertible, good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based pseudorandom stream. The tuple (seed, user_id, role) is
// hashed into a key; output i is mix64(key + i * golden), so streams with
// distinct tuples behave independently and a stream can be re-created at
// any point from its tuple alone.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t user_id, StreamRole role)
      : key_(detail::mix64(detail::mix64(detail::mix64(seed) ^
                                         (user_id * 0xd6e8feb86659fd93ULL)) ^
                           static_cast<std::uint64_t>(role))) {}

  explicit RandomStream(std::uint64_t seed)
      : RandomStream(seed, 0, StreamRole::kPayload) {}

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    return detail::mix64(key_ + 0x9e3779b97f4a7c15ULL * counter_++);
  }

  // Uniform integer in [0, bound). Unbiased via rejection on the top range.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = ~0ULL - ~0ULL % bound;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform_double() < p;
  }

  // Number of Bernoulli(p) failures before the next success; used for
  // skip-sampling sparse Bernoulli vectors in O(successes) time.
  // Requires 0 < p < 1.
  std::uint64_t geometric_skip(double p) {
    double u;
    do {
      u = uniform_double();
    } while (u <= 0.0);
    const double g = std::floor(std::log(u) / std::log1p(-p));
    if (g >= 9.2e18) return ~0ULL;
    return static_cast<std::uint64_t>(g);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sdp
