#pragma once

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdp/rng.hpp"

namespace sdp {

inline std::uint64_t hash_value(std::uint32_t v) {
  return detail::mix64(v);
}
inline std::uint64_t hash_value(std::uint64_t v) {
  return detail::mix64(v);
}

template <typename Msg>
struct BatchHash {
  std::size_t operator()(const Msg& m) const {
    return static_cast<std::size_t>(hash_value(m));
  }
};

// Order-free multiset of messages, stored as message -> multiplicity.
// Analyzers only ever consume the multiset (the permutation the shuffler
// applies is immaterial to them); a concrete uniformly permuted sequence
// is materialized on request.
template <typename Msg>
class ShuffledBatch {
 public:
  using Map = std::unordered_map<Msg, std::uint64_t, BatchHash<Msg>>;

  void add(const Msg& m, std::uint64_t multiplicity = 1) {
    if (multiplicity == 0) return;
    map_[m] += multiplicity;
    total_ += multiplicity;
  }

  template <typename Range>
  void add_all(const Range& msgs) {
    for (const Msg& m : msgs) add(m);
  }

  void merge(const ShuffledBatch& other) {
    for (const auto& [m, c] : other.map_) add(m, c);
  }

  std::uint64_t total_messages() const { return total_; }
  std::size_t distinct_messages() const { return map_.size(); }

  std::uint64_t multiplicity(const Msg& m) const {
    auto it = map_.find(m);
    return it == map_.end() ? 0 : it->second;
  }

  typename Map::const_iterator begin() const { return map_.begin(); }
  typename Map::const_iterator end() const { return map_.end(); }

  bool operator==(const ShuffledBatch& other) const {
    return total_ == other.total_ && map_ == other.map_;
  }

  // Uniformly permuted sequence of all messages (Fisher-Yates over the
  // expanded concatenation).
  std::vector<Msg> materialize(RandomStream& rng) const {
    std::vector<Msg> seq;
    seq.reserve(total_);
    for (const auto& [m, c] : map_) {
      for (std::uint64_t i = 0; i < c; ++i) seq.push_back(m);
    }
    for (std::size_t i = seq.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
      std::swap(seq[i - 1], seq[j]);
    }
    return seq;
  }

 private:
  Map map_;
  std::uint64_t total_ = 0;
};

// The shuffler: collapses per-user message sequences into one multiset.
// The rng only drives the (lazy) permutation, so it is accepted and kept
// unused here; analyzer results are invariant under it by construction.
template <typename Msg>
ShuffledBatch<Msg> shuffle(const std::vector<std::vector<Msg>>& per_user,
                           RandomStream& /*rng*/) {
  ShuffledBatch<Msg> batch;
  for (const auto& msgs : per_user) batch.add_all(msgs);
  return batch;
}

}  // namespace sdp
