#pragma once

#include <cstdint>
#include <utility>

#include "sdp/domain.hpp"

namespace sdp {

// Queryable estimate of the count of any j in [1, B]. Implementations
// document their per-query cost; all queries are read-only.
class FrequencyOracle {
 public:
  virtual ~FrequencyOracle() = default;

  virtual std::uint64_t domain_size() const = 0;

  // Estimated unnormalized count of element j. Throws DomainError for
  // j outside [1, B].
  virtual double query(DomainElement j) const = 0;

 protected:
  void check_domain(DomainElement j) const {
    if (j < 1 || j > domain_size()) {
      throw DomainError("frequency oracle query outside [1, B]");
    }
  }
};

// Noiseless oracle backed by a count vector. O(1) per query.
class ExactOracle final : public FrequencyOracle {
 public:
  explicit ExactOracle(CountVector counts) : counts_(std::move(counts)) {}

  std::uint64_t domain_size() const override { return counts_.size(); }

  double query(DomainElement j) const override {
    check_domain(j);
    return counts_[j - 1];
  }

 private:
  CountVector counts_;
};

}  // namespace sdp
