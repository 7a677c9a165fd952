#include "sdp/countmin.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "sdp/error.hpp"

namespace sdp {

void CMParams::validate() const {
  if (rows < 1) throw ParameterError("countmin: tau >= 1");
  if (buckets < 1) throw ParameterError("countmin: s >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ParameterError("countmin: gamma in [0, 1]");
  }
  if (k < 1) throw ParameterError("countmin: k >= 1");
}

namespace {

std::uint64_t mulmod_mersenne61(std::uint64_t x, std::uint64_t y) {
  const unsigned __int128 z = static_cast<unsigned __int128>(x) * y;
  std::uint64_t lo = static_cast<std::uint64_t>(z & HashFamily::kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(z >> 61);
  std::uint64_t r = lo + hi;
  if (r >= HashFamily::kPrime) r -= HashFamily::kPrime;
  return r;
}

}  // namespace

HashFamily::HashFamily(std::uint32_t rows, std::uint64_t buckets,
                       std::uint64_t seed)
    : buckets_(buckets), seed_(seed) {
  if (rows < 1 || buckets < 1) {
    throw ParameterError("hash family: rows and buckets must be >= 1");
  }
  a_.resize(rows);
  b_.resize(rows);
  for (std::uint32_t t = 0; t < rows; ++t) {
    RandomStream rng(seed, t + 1, StreamRole::kHash);
    a_[t] = rng.uniform_below(kPrime - 1) + 1;  // in [1, p-1]
    b_[t] = rng.uniform_below(kPrime);          // in [0, p-1]
  }
}

HashFamily::HashFamily(std::vector<std::uint64_t> a,
                       std::vector<std::uint64_t> b, std::uint64_t buckets)
    : a_(std::move(a)), b_(std::move(b)), buckets_(buckets), seed_(0) {
  if (a_.empty() || a_.size() != b_.size() || buckets < 1) {
    throw ParameterError("hash family: bad explicit coefficients");
  }
  for (std::size_t t = 0; t < a_.size(); ++t) {
    if (a_[t] < 1 || a_[t] >= kPrime || b_[t] >= kPrime) {
      throw ParameterError("hash family: coefficients outside the field");
    }
  }
}

std::uint64_t HashFamily::eval(std::uint32_t t, DomainElement j) const {
  if (t < 1 || t > a_.size()) {
    throw ParameterError("hash family: row index outside [1, tau]");
  }
  std::uint64_t v = mulmod_mersenne61(a_[t - 1], j);
  v += b_[t - 1];
  if (v >= kPrime) v -= kPrime;
  const std::uint64_t m = v % buckets_;
  return m == 0 ? buckets_ : m;
}

void CMSketch::merge(const CMSketch& other) {
  if (rows != other.rows || buckets != other.buckets) {
    throw ParameterError("sketch merge: incompatible shapes");
  }
  for (std::size_t i = 0; i < table.size(); ++i) table[i] += other.table[i];
}

std::uint64_t CMSketch::total() const {
  std::uint64_t s = 0;
  for (std::uint64_t c : table) s += c;
  return s;
}

std::vector<CMMessage> randomize_cm(const UserInput& input, const CMParams& p,
                                    const HashFamily& family,
                                    std::uint64_t seed,
                                    std::uint64_t user_id) {
  p.validate();
  if (input.size() > p.k) {
    throw SparsityError("randomize_cm: user holds more than k elements");
  }
  std::vector<CMMessage> out;
  out.reserve(input.size() * p.rows +
              static_cast<std::size_t>(p.gamma * static_cast<double>(p.rows) *
                                       static_cast<double>(p.buckets)) +
              8);
  for (DomainElement j : input.elements) {
    if (j < 1 || j > p.domain_size) {
      throw DomainError("randomize_cm: element outside [1, B]");
    }
    for (std::uint32_t t = 1; t <= p.rows; ++t) {
      out.push_back(CMMessage{t, family.eval(t, j)});
    }
  }

  const std::uint64_t cells = static_cast<std::uint64_t>(p.rows) * p.buckets;
  if (p.gamma >= 1.0) {
    // Ber(1): every cell, deterministically.
    for (std::uint64_t c = 0; c < cells; ++c) {
      out.push_back(CMMessage{static_cast<std::uint32_t>(c / p.buckets) + 1,
                              c % p.buckets + 1});
    }
  } else if (p.gamma > 0.0) {
    RandomStream blanket(seed, user_id, StreamRole::kBlanket);
    std::uint64_t c = blanket.geometric_skip(p.gamma);
    while (c < cells) {
      out.push_back(CMMessage{static_cast<std::uint32_t>(c / p.buckets) + 1,
                              c % p.buckets + 1});
      const std::uint64_t skip = blanket.geometric_skip(p.gamma);
      if (cells - c <= skip) break;
      c += skip + 1;
    }
  }
  return out;
}

CMSketch analyze_cm(const CMBatch& batch, const CMParams& p) {
  p.validate();
  CMSketch sk;
  sk.rows = p.rows;
  sk.buckets = p.buckets;
  sk.table.assign(static_cast<std::size_t>(p.rows) * p.buckets, 0);
  for (const auto& [m, mult] : batch) {
    if (m.row < 1 || m.row > p.rows || m.bucket < 1 || m.bucket > p.buckets) {
      throw FormatError("countmin message outside [1,tau] x [1,s]");
    }
    sk.at(m.row, m.bucket) += mult;
  }
  return sk;
}

double query_cm(const CMSketch& sketch, DomainElement j, const CMParams& p,
                const HashFamily& family) {
  if (j < 1 || j > p.domain_size) {
    throw DomainError("query_cm: element outside [1, B]");
  }
  std::uint64_t m = ~0ULL;
  for (std::uint32_t t = 1; t <= p.rows; ++t) {
    m = std::min(m, sketch.at(t, family.eval(t, j)));
  }
  const double raw = static_cast<double>(m);
  if (p.one_sided) return raw;
  return std::max(raw - p.gamma * static_cast<double>(p.n), 0.0);
}

CMSketchAccumulator::CMSketchAccumulator(const CMParams& p,
                                         const HashFamily& family)
    : params_(p), family_(&family) {
  p.validate();
  sketch_.rows = p.rows;
  sketch_.buckets = p.buckets;
  sketch_.table.assign(static_cast<std::size_t>(p.rows) * p.buckets, 0);
}

void CMSketchAccumulator::add_user(const UserInput& input, std::uint64_t seed,
                                   std::uint64_t user_id) {
  if (finalized_) throw ParameterError("accumulator already finalized");
  if (input.size() > params_.k) {
    throw SparsityError("countmin accumulator: user holds more than k elements");
  }
  for (DomainElement j : input.elements) {
    if (j < 1 || j > params_.domain_size) {
      throw DomainError("countmin accumulator: element outside [1, B]");
    }
    for (std::uint32_t t = 1; t <= params_.rows; ++t) {
      ++sketch_.at(t, family_->eval(t, j));
      ++messages_;
    }
  }
  const std::uint64_t cells =
      static_cast<std::uint64_t>(params_.rows) * params_.buckets;
  if (params_.gamma > 0.0 && params_.gamma < 1.0) {
    RandomStream blanket(seed, user_id, StreamRole::kBlanket);
    std::uint64_t c = blanket.geometric_skip(params_.gamma);
    while (c < cells) {
      ++sketch_.table[c];
      ++messages_;
      const std::uint64_t skip = blanket.geometric_skip(params_.gamma);
      if (cells - c <= skip) break;
      c += skip + 1;
    }
  } else if (params_.gamma >= 1.0) {
    messages_ += cells;
  }
  ++users_seen_;
}

CMSketch CMSketchAccumulator::finalize() {
  finalized_ = true;
  if (params_.gamma >= 1.0) {
    for (std::uint64_t& cell : sketch_.table) cell += users_seen_;
  }
  return std::move(sketch_);
}

CMOracle::CMOracle(CMSketch sketch, CMParams params, HashFamily family)
    : sketch_(std::move(sketch)),
      params_(std::move(params)),
      family_(std::move(family)) {}

double CMOracle::query(DomainElement j) const {
  check_domain(j);
  return query_cm(sketch_, j, params_, family_);
}

void write_sketch(std::ostream& out, const CMSketch& sketch,
                  const CMParams& p) {
  out << sketch.rows << ' ' << sketch.buckets << ' ' << p.gamma << ' ' << p.n
      << '\n';
  for (std::uint32_t t = 1; t <= sketch.rows; ++t) {
    for (std::uint64_t ell = 1; ell <= sketch.buckets; ++ell) {
      if (ell > 1) out << ' ';
      out << sketch.at(t, ell);
    }
    out << '\n';
  }
}

CMSketch read_sketch(std::istream& in, CMParams* p_out) {
  CMSketch sk;
  double gamma = 0.0;
  std::uint64_t n = 0;
  if (!(in >> sk.rows >> sk.buckets >> gamma >> n)) {
    throw FormatError("sketch dump: bad header");
  }
  sk.table.assign(static_cast<std::size_t>(sk.rows) * sk.buckets, 0);
  for (std::uint64_t& cell : sk.table) {
    if (!(in >> cell)) throw FormatError("sketch dump: truncated table");
  }
  if (p_out != nullptr) {
    p_out->rows = sk.rows;
    p_out->buckets = sk.buckets;
    p_out->gamma = gamma;
    p_out->n = n;
  }
  return sk;
}

}  // namespace sdp
