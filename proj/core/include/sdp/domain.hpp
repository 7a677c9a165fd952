#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdp/error.hpp"

namespace sdp {

// Elements of the input domain are 1-based on the API surface; bit-level
// code works with value-1 internally.
using DomainElement = std::uint32_t;

// Unnormalized counts, one per domain element (index 0 holds element 1).
using CountVector = std::vector<double>;

// The (deduplicated, sorted) set of at most k elements one user holds.
struct UserInput {
  std::vector<DomainElement> elements;

  UserInput() = default;
  explicit UserInput(std::vector<DomainElement> elems)
      : elements(std::move(elems)) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()),
                   elements.end());
  }

  std::size_t size() const { return elements.size(); }
};

struct Dataset {
  std::vector<UserInput> users;
  std::uint64_t domain_size = 0;  // B
  std::uint32_t sparsity = 1;     // k, max elements per user

  std::size_t num_users() const { return users.size(); }

  // Throws if any element is outside [1, B] or any user exceeds k.
  void validate() const;
};

// hist(X): counts[j-1] = number of users whose set contains j.
CountVector exact_histogram(const Dataset& dataset);

// Smallest power of two >= B (B >= 1).
std::uint64_t pad_domain(std::uint64_t domain_size);

// Text format: one user per line, comma-separated integers in [1, B];
// an empty line is an empty set.
Dataset read_dataset(std::istream& in, std::uint64_t domain_size,
                     std::uint32_t sparsity);
Dataset read_dataset_file(const std::string& path, std::uint64_t domain_size,
                          std::uint32_t sparsity);

// d-dimensional points, one per line, d comma-separated coordinates in
// [1, B0] each.
std::vector<std::vector<DomainElement>> read_points_file(
    const std::string& path, std::uint64_t per_dim_size, std::uint32_t dim);

}  // namespace sdp
