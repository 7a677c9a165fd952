#pragma once

#include <cstdint>
#include <vector>

#include "sdp/domain.hpp"

namespace sdp {

// Node v_{t,s} of the complete binary tree over [B]: depth t in
// [0, log B], position s in [1, 2^t].
struct TreeIndex {
  std::uint32_t depth = 0;
  std::uint64_t pos = 1;

  bool operator==(const TreeIndex&) const = default;
};

// Signed +-1 coefficients on C_B indices; entries sorted by index, no
// zero coefficients stored.
struct SignedSparseVector {
  std::vector<std::pair<std::uint64_t, int>> entries;

  std::size_t size() const { return entries.size(); }
};

// Number of ones in the binary representation of j.
std::uint32_t count_ones(std::uint64_t j);

// The j-th node of C_B in top-to-bottom left-to-right order:
// (0,1) for j = 1, else (ceil(log2 j), 2(j - 2^{t-1}) - 1). The position
// is always odd (root or a left child).
TreeIndex node_index(std::uint64_t j, std::uint64_t domain_size);

// Inverse of node_index on C_B members.
std::uint64_t cb_index(const TreeIndex& node);

// Indices j in C_B order whose node is an ancestor of leaf x and lies in
// C_B; these are the nonzero rows of column x of M_B. At most 1 + log2 B
// entries, ascending.
std::vector<std::uint64_t> column_support(DomainElement x,
                                          std::uint64_t domain_size);

// Signed coefficients nu with <nu, M_B z> = z_j + ... + z_{j'} for every
// z; built as the difference of the two prefix decompositions, shared
// nodes cancelling. Support at most c(j-1) + c(j').
SignedSparseVector range_decomposition(std::uint64_t j, std::uint64_t j_hi,
                                       std::uint64_t domain_size);

// ---- d-dimensional tensor versions. Flattened row-major over the
// per-dimension C_{B0} orderings; flat((i_1..i_d)) =
// sum (i_p - 1) B0^{d-p} + 1. ----

struct RangeQuery {
  std::vector<std::uint64_t> lo, hi;  // 1 <= lo_p <= hi_p <= B0

  std::uint32_t dims() const { return static_cast<std::uint32_t>(lo.size()); }
};

std::uint64_t flatten_index(const std::vector<std::uint64_t>& per_dim,
                            std::uint64_t per_dim_size);

std::vector<std::uint64_t> column_support_d(
    const std::vector<DomainElement>& point, std::uint64_t per_dim_size,
    std::uint32_t dims);

SignedSparseVector range_decomposition_d(const RangeQuery& query,
                                         std::uint64_t per_dim_size,
                                         std::uint32_t dims);

// Applies M_B to leaf counts: y[i-1] = sum of z over leaves below the
// i-th C_B node, computed through column supports. Test oracle and
// noiseless path; O(B log B).
std::vector<double> apply_range_matrix(const std::vector<double>& leaf_counts,
                                       std::uint64_t domain_size);

// d-dimensional variant over flattened leaf counts of length B0^d.
std::vector<double> apply_range_matrix_d(
    const std::vector<double>& leaf_counts, std::uint64_t per_dim_size,
    std::uint32_t dims);

}  // namespace sdp
