#include "sdp/hadamard.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sdp/error.hpp"

namespace sdp {

void HadParams::validate() const {
  if (domain_size < 2 || !std::has_single_bit(domain_size)) {
    throw ParameterError("hadamard: B must be a power of two >= 2");
  }
  if (tau < 1) throw ParameterError("hadamard: tau >= 1 (tau = 0 breaks de-biasing)");
  if (k < 1 || k >= domain_size) throw ParameterError("hadamard: 1 <= k < B");
}

std::uint32_t HadParams::symbol_bits() const {
  return static_cast<std::uint32_t>(std::bit_width(2 * domain_size - 1));
}

bool had_member(std::uint64_t j, std::uint64_t a, std::uint64_t domain_size) {
  if (j == 0 || j >= 2 * domain_size) {
    throw DomainError("had_member: j must lie in [1, 2B-1]");
  }
  if (a < 1 || a > 2 * domain_size) {
    throw DomainError("had_member: a must lie in [1, 2B]");
  }
  return (std::popcount(j & (a - 1)) & 1) == 0;
}

namespace {

// Uniform symbol of H_{2B,j}: fix the lowest set bit of j to absorb the
// parity, draw the remaining symbol_bits-1 bits freely. Bijective, so the
// draw is uniform over the codeword (which has size B).
std::uint32_t sample_codeword_symbol(std::uint64_t j, std::uint32_t bits,
                                     RandomStream& rng) {
  const std::uint32_t b = static_cast<std::uint32_t>(std::countr_zero(j));
  const std::uint64_t r = rng.uniform_below(1ULL << (bits - 1));
  const std::uint64_t low = r & ((1ULL << b) - 1);
  const std::uint64_t high = (r >> b) << (b + 1);
  std::uint64_t x = low | high;
  if (std::popcount(j & x) & 1) x |= 1ULL << b;
  return static_cast<std::uint32_t>(x + 1);
}

// Row-by-row Gaussian elimination over F2 on words of up to 32 columns.
// Rows reduce against a column-indexed echelon basis (each stored row
// leads at its highest set bit); kernel vectors come out of
// back-substitution over ascending pivot columns.
class F2Eliminator {
 public:
  void add_row(std::uint32_t r) {
    while (r != 0) {
      const std::uint32_t c =
          31u - static_cast<std::uint32_t>(std::countl_zero(r));
      if (colpiv_[c] == 0) {
        colpiv_[c] = r;
        pivmask_ |= 1u << c;
        ++rank_;
        return;
      }
      r ^= colpiv_[c];
    }
  }

  std::uint32_t rank() const { return rank_; }

  // Visits every nonzero x in {0,1}^width with <x, row> = 0 for all rows.
  template <typename Fn>
  void for_each_kernel_nonzero(std::uint32_t width, Fn&& fn) const {
    if (rank_ == width) return;  // kernel is {0}
    std::uint32_t kb[32];
    std::uint32_t nfree = 0;
    for (std::uint32_t f = 0; f < width; ++f) {
      if ((pivmask_ >> f) & 1u) continue;
      // Solve for the pivot bits with free column f set; a stored row
      // leading at c has all other bits below c, so ascending order
      // leaves each bit determined by the time it is needed.
      std::uint32_t x = 1u << f;
      std::uint32_t rest = pivmask_ & ~((1u << f) - 1u);
      while (rest != 0) {
        const std::uint32_t c =
            static_cast<std::uint32_t>(std::countr_zero(rest));
        rest &= rest - 1;
        if (std::popcount(colpiv_[c] & x) & 1u) x |= 1u << c;
      }
      kb[nfree++] = x;
    }
    std::uint32_t x = 0;
    const std::uint64_t limit = 1ULL << nfree;
    for (std::uint64_t g = 1; g < limit; ++g) {
      x ^= kb[std::countr_zero(g)];
      fn(x);
    }
  }

 private:
  std::uint32_t colpiv_[32] = {0};
  std::uint32_t pivmask_ = 0;
  std::uint32_t rank_ = 0;
};

}  // namespace

std::vector<HadMessage> randomize_had(const UserInput& input,
                                      const HadParams& p, std::uint64_t seed,
                                      std::uint64_t user_id) {
  p.validate();
  if (input.size() > p.k) {
    throw SparsityError("randomize_had: user holds more than k elements");
  }
  for (DomainElement e : input.elements) {
    if (e < 1 || e > p.domain_size) {
      throw DomainError("randomize_had: element outside [1, B]");
    }
  }

  // Augment with B+1, B+2, ... so every user encodes exactly k elements.
  std::vector<std::uint64_t> elems(input.elements.begin(),
                                   input.elements.end());
  for (std::uint64_t j = p.domain_size + 1; elems.size() < p.k; ++j) {
    elems.push_back(j);
  }

  const std::uint32_t bits = p.symbol_bits();
  std::vector<HadMessage> out;
  out.reserve(elems.size() + p.rho);

  RandomStream payload(seed, user_id, StreamRole::kPayload);
  for (std::uint64_t j : elems) {
    HadMessage m(p.tau);
    for (std::uint32_t t = 0; t < p.tau; ++t) {
      m[t] = sample_codeword_symbol(j, bits, payload);
    }
    out.push_back(std::move(m));
  }

  RandomStream blanket(seed, user_id, StreamRole::kBlanket);
  for (std::uint64_t g = 0; g < p.rho; ++g) {
    HadMessage m(p.tau);
    for (std::uint32_t t = 0; t < p.tau; ++t) {
      m[t] = static_cast<std::uint32_t>(
          blanket.uniform_below(2 * p.domain_size) + 1);
    }
    out.push_back(std::move(m));
  }
  return out;
}

HadRawAccumulator::HadRawAccumulator(const HadParams& p) : params_(p) {
  p.validate();
  raw_.assign(p.domain_size, 0);
}

void HadRawAccumulator::add(const HadMessage& message,
                            std::uint64_t multiplicity) {
  if (message.size() != params_.tau) {
    throw FormatError("hadamard message has wrong symbol count");
  }
  F2Eliminator elim;
  for (std::uint32_t a : message) {
    if (a < 1 || a > 2 * params_.domain_size) {
      throw FormatError("hadamard symbol outside [1, 2B]");
    }
    elim.add_row(a - 1);
  }
  const std::uint64_t b = params_.domain_size;
  elim.for_each_kernel_nonzero(params_.symbol_bits(), [&](std::uint32_t j) {
    if (j <= b) raw_[j - 1] += multiplicity;
  });
  messages_ += multiplicity;
}

void HadRawAccumulator::add_batch(const HadBatch& batch) {
  for (const auto& [m, c] : batch) add(m, c);
}

std::vector<std::uint32_t> had_kernel_elements(const HadMessage& message,
                                               const HadParams& p) {
  F2Eliminator elim;
  for (std::uint32_t a : message) {
    if (a < 1 || a > 2 * p.domain_size) {
      throw FormatError("hadamard symbol outside [1, 2B]");
    }
    elim.add_row(a - 1);
  }
  std::vector<std::uint32_t> out;
  elim.for_each_kernel_nonzero(p.symbol_bits(),
                               [&](std::uint32_t j) { out.push_back(j); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> raw_had_counts(const HadBatch& batch,
                                          const HadParams& p) {
  p.validate();
  std::vector<std::uint64_t> raw(p.domain_size, 0);
  for (const auto& [m, mult] : batch) {
    if (m.size() != p.tau) {
      throw FormatError("hadamard message has wrong symbol count");
    }
    for (std::uint64_t j = 1; j <= p.domain_size; ++j) {
      bool inside = true;
      for (std::uint32_t a : m) {
        if (!had_member(j, a, p.domain_size)) {
          inside = false;
          break;
        }
      }
      if (inside) raw[j - 1] += mult;
    }
  }
  return raw;
}

CountVector debias_had(const std::vector<std::uint64_t>& raw,
                       const HadParams& p) {
  if (p.tau == 0) throw ParameterError("debias_had: tau = 0 divides by zero");
  const double q = std::ldexp(1.0, -static_cast<int>(p.tau));  // 2^-tau
  const double expected =
      (static_cast<double>(p.rho) + static_cast<double>(p.k)) *
      static_cast<double>(p.n) * q;
  CountVector out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = (static_cast<double>(raw[i]) - expected) / (1.0 - q);
  }
  return out;
}

CountVector analyze_had(const HadBatch& batch, const HadParams& p) {
  return debias_had(raw_had_counts(batch, p), p);
}

CountVector analyze_had_fast(const HadBatch& batch, const HadParams& p) {
  HadRawAccumulator acc(p);
  acc.add_batch(batch);
  return debias_had(acc.raw_counts(), p);
}

HadOracle::HadOracle(const HadBatch& batch, const HadParams& p) : params_(p) {
  p.validate();
  messages_.reserve(batch.distinct_messages());
  for (const auto& [m, c] : batch) {
    if (m.size() != p.tau) {
      throw FormatError("hadamard message has wrong symbol count");
    }
    messages_.emplace_back(m, c);
  }
}

double HadOracle::query(DomainElement j) const {
  check_domain(j);
  std::uint64_t raw = 0;
  for (const auto& [m, mult] : messages_) {
    bool inside = true;
    for (std::uint32_t a : m) {
      if (!had_member(j, a, params_.domain_size)) {
        inside = false;
        break;
      }
    }
    if (inside) raw += mult;
  }
  const double q = std::ldexp(1.0, -static_cast<int>(params_.tau));
  const double expected =
      (static_cast<double>(params_.rho) + static_cast<double>(params_.k)) *
      static_cast<double>(params_.n) * q;
  return (static_cast<double>(raw) - expected) / (1.0 - q);
}

HadOracle build_oracle_had(const HadBatch& batch, const HadParams& p) {
  return HadOracle(batch, p);
}

std::string had_message_to_hex(const HadMessage& m, const HadParams& p) {
  const std::uint32_t bits = p.symbol_bits();
  const std::size_t nbits = static_cast<std::size_t>(bits) * m.size();
  std::vector<std::uint8_t> bytes((nbits + 7) / 8, 0);
  std::size_t pos = 0;
  for (std::uint32_t sym : m) {
    const std::uint32_t v = sym - 1;
    for (std::uint32_t b = 0; b < bits; ++b, ++pos) {
      if ((v >> b) & 1u) bytes[pos / 8] |= static_cast<std::uint8_t>(1u << (pos % 8));
    }
  }
  static const char* digits = "0123456789abcdef";
  std::string hex;
  hex.reserve(bytes.size() * 2);
  for (std::uint8_t byte : bytes) {
    hex.push_back(digits[byte >> 4]);
    hex.push_back(digits[byte & 0xf]);
  }
  return hex;
}

HadMessage had_message_from_hex(const std::string& hex, const HadParams& p) {
  const std::uint32_t bits = p.symbol_bits();
  const std::size_t nbits = static_cast<std::size_t>(bits) * p.tau;
  if (hex.size() != 2 * ((nbits + 7) / 8)) {
    throw FormatError("hadamard hex message has wrong length");
  }
  std::vector<std::uint8_t> bytes(hex.size() / 2);
  auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw FormatError("invalid hex digit in message dump");
  };
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) |
                                         nibble(hex[2 * i + 1]));
  }
  HadMessage m(p.tau);
  std::size_t pos = 0;
  for (std::uint32_t t = 0; t < p.tau; ++t) {
    std::uint32_t v = 0;
    for (std::uint32_t b = 0; b < bits; ++b, ++pos) {
      if ((bytes[pos / 8] >> (pos % 8)) & 1u) v |= 1u << b;
    }
    if (v >= 2 * p.domain_size) {
      throw FormatError("hadamard symbol outside [1, 2B] in message dump");
    }
    m[t] = v + 1;
  }
  return m;
}

}  // namespace sdp
