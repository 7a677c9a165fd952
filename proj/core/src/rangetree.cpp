#include "sdp/rangetree.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "sdp/error.hpp"

namespace sdp {

namespace {

std::uint32_t log2_exact(std::uint64_t b, const char* what) {
  if (b < 1 || !std::has_single_bit(b)) {
    throw ParameterError(std::string(what) + ": B must be a power of two");
  }
  return static_cast<std::uint32_t>(std::countr_zero(b));
}

}  // namespace

std::uint32_t count_ones(std::uint64_t j) {
  return static_cast<std::uint32_t>(std::popcount(j));
}

TreeIndex node_index(std::uint64_t j, std::uint64_t domain_size) {
  log2_exact(domain_size, "node_index");
  if (j < 1 || j > domain_size) {
    throw DomainError("node_index: j outside [1, B]");
  }
  if (j == 1) return TreeIndex{0, 1};
  const std::uint32_t t =
      static_cast<std::uint32_t>(std::bit_width(j - 1));  // ceil(log2 j)
  return TreeIndex{t, 2 * (j - (1ULL << (t - 1))) - 1};
}

std::uint64_t cb_index(const TreeIndex& node) {
  if (node.depth == 0) {
    if (node.pos != 1) throw DomainError("cb_index: root is (0, 1)");
    return 1;
  }
  if ((node.pos & 1) == 0) {
    throw DomainError("cb_index: node is not in C_B (even position)");
  }
  return (1ULL << (node.depth - 1)) + (node.pos + 1) / 2;
}

std::vector<std::uint64_t> column_support(DomainElement x,
                                          std::uint64_t domain_size) {
  const std::uint32_t logb = log2_exact(domain_size, "column_support");
  if (x < 1 || x > domain_size) {
    throw DomainError("column_support: x outside [1, B]");
  }
  std::vector<std::uint64_t> out;
  out.reserve(logb + 1);
  for (std::uint32_t t = 0; t <= logb; ++t) {
    // Ancestor of leaf x at depth t.
    const std::uint64_t s = ((static_cast<std::uint64_t>(x) - 1) >>
                             (logb - t)) + 1;
    if (t == 0 || (s & 1)) out.push_back(cb_index(TreeIndex{t, s}));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// C_B nodes summing to the prefix z_1 + ... + z_{jp} (all +1): walk the
// root-to-first-C_B-ancestor path of leaf jp; at every step that takes a
// right child, pick up the left sibling; finally the path endpoint.
// Yields exactly c(jp) nodes.
void prefix_nodes(std::uint64_t jp, std::uint32_t logb,
                  std::vector<std::uint64_t>& out) {
  if (jp == 0) return;
  const std::uint32_t val = static_cast<std::uint32_t>(std::countr_zero(jp));
  const std::uint32_t t_end = logb - val;
  const std::uint64_t s_end = jp >> val;
  for (std::uint32_t t = 1; t <= t_end; ++t) {
    const std::uint64_t s = ((s_end - 1) >> (t_end - t)) + 1;
    if ((s & 1) == 0) out.push_back(cb_index(TreeIndex{t, s - 1}));
  }
  out.push_back(cb_index(TreeIndex{t_end, s_end}));
}

}  // namespace

SignedSparseVector range_decomposition(std::uint64_t j, std::uint64_t j_hi,
                                       std::uint64_t domain_size) {
  const std::uint32_t logb = log2_exact(domain_size, "range_decomposition");
  if (j < 1 || j_hi > domain_size || j > j_hi) {
    throw DomainError("range_decomposition: need 1 <= j <= j' <= B");
  }
  std::vector<std::uint64_t> plus, minus;
  prefix_nodes(j_hi, logb, plus);
  prefix_nodes(j - 1, logb, minus);

  std::map<std::uint64_t, int> coeffs;
  for (std::uint64_t idx : plus) coeffs[idx] += 1;
  for (std::uint64_t idx : minus) coeffs[idx] -= 1;

  SignedSparseVector out;
  for (const auto& [idx, c] : coeffs) {
    if (c != 0) out.entries.emplace_back(idx, c);
  }
  return out;
}

std::uint64_t flatten_index(const std::vector<std::uint64_t>& per_dim,
                            std::uint64_t per_dim_size) {
  std::uint64_t flat = 0;
  for (std::uint64_t idx : per_dim) {
    flat = flat * per_dim_size + (idx - 1);
  }
  return flat + 1;
}

std::vector<std::uint64_t> column_support_d(
    const std::vector<DomainElement>& point, std::uint64_t per_dim_size,
    std::uint32_t dims) {
  if (point.size() != dims || dims < 1) {
    throw ParameterError("column_support_d: point has wrong dimension");
  }
  std::vector<std::vector<std::uint64_t>> per_dim(dims);
  for (std::uint32_t p = 0; p < dims; ++p) {
    per_dim[p] = column_support(point[p], per_dim_size);
  }
  std::vector<std::uint64_t> out;
  std::vector<std::size_t> pick(dims, 0);
  for (;;) {
    std::vector<std::uint64_t> tuple(dims);
    for (std::uint32_t p = 0; p < dims; ++p) tuple[p] = per_dim[p][pick[p]];
    out.push_back(flatten_index(tuple, per_dim_size));
    std::uint32_t p = dims;
    while (p > 0) {
      --p;
      if (++pick[p] < per_dim[p].size()) break;
      pick[p] = 0;
      if (p == 0) {
        std::sort(out.begin(), out.end());
        return out;
      }
    }
  }
}

SignedSparseVector range_decomposition_d(const RangeQuery& query,
                                         std::uint64_t per_dim_size,
                                         std::uint32_t dims) {
  if (query.lo.size() != dims || query.hi.size() != dims || dims < 1) {
    throw ParameterError("range_decomposition_d: query has wrong dimension");
  }
  std::vector<SignedSparseVector> per_dim(dims);
  for (std::uint32_t p = 0; p < dims; ++p) {
    per_dim[p] = range_decomposition(query.lo[p], query.hi[p], per_dim_size);
  }
  SignedSparseVector out;
  std::vector<std::size_t> pick(dims, 0);
  for (;;) {
    std::vector<std::uint64_t> tuple(dims);
    int sign = 1;
    for (std::uint32_t p = 0; p < dims; ++p) {
      tuple[p] = per_dim[p].entries[pick[p]].first;
      sign *= per_dim[p].entries[pick[p]].second;
    }
    out.entries.emplace_back(flatten_index(tuple, per_dim_size), sign);
    std::uint32_t p = dims;
    while (p > 0) {
      --p;
      if (++pick[p] < per_dim[p].entries.size()) break;
      pick[p] = 0;
      if (p == 0) {
        std::sort(out.entries.begin(), out.entries.end());
        return out;
      }
    }
  }
}

std::vector<double> apply_range_matrix(const std::vector<double>& leaf_counts,
                                       std::uint64_t domain_size) {
  log2_exact(domain_size, "apply_range_matrix");
  if (leaf_counts.size() != domain_size) {
    throw ParameterError("apply_range_matrix: wrong vector length");
  }
  std::vector<double> y(domain_size, 0.0);
  for (std::uint64_t x = 1; x <= domain_size; ++x) {
    const double z = leaf_counts[x - 1];
    if (z == 0.0) continue;
    for (std::uint64_t idx : column_support(static_cast<DomainElement>(x),
                                            domain_size)) {
      y[idx - 1] += z;
    }
  }
  return y;
}

std::vector<double> apply_range_matrix_d(
    const std::vector<double>& leaf_counts, std::uint64_t per_dim_size,
    std::uint32_t dims) {
  std::uint64_t total = 1;
  for (std::uint32_t p = 0; p < dims; ++p) total *= per_dim_size;
  if (leaf_counts.size() != total) {
    throw ParameterError("apply_range_matrix_d: wrong vector length");
  }
  std::vector<double> y(total, 0.0);
  std::vector<DomainElement> point(dims, 1);
  for (std::uint64_t flat = 0; flat < total; ++flat) {
    const double z = leaf_counts[flat];
    if (z != 0.0) {
      std::uint64_t rem = flat;
      for (std::uint32_t p = dims; p > 0; --p) {
        point[p - 1] = static_cast<DomainElement>(rem % per_dim_size + 1);
        rem /= per_dim_size;
      }
      for (std::uint64_t idx : column_support_d(point, per_dim_size, dims)) {
        y[idx - 1] += z;
      }
    }
  }
  return y;
}

}  // namespace sdp
