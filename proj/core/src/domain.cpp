#include "sdp/domain.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace sdp {

void Dataset::validate() const {
  for (std::size_t i = 0; i < users.size(); ++i) {
    const UserInput& u = users[i];
    if (u.size() > sparsity) {
      throw SparsityError("user " + std::to_string(i + 1) + " holds " +
                          std::to_string(u.size()) + " elements, bound is " +
                          std::to_string(sparsity));
    }
    for (DomainElement e : u.elements) {
      if (e < 1 || e > domain_size) {
        throw DomainError("element " + std::to_string(e) +
                          " outside [1, " + std::to_string(domain_size) + "]");
      }
    }
  }
}

CountVector exact_histogram(const Dataset& dataset) {
  CountVector counts(dataset.domain_size, 0.0);
  for (const UserInput& u : dataset.users) {
    for (DomainElement e : u.elements) {
      if (e < 1 || e > dataset.domain_size) {
        throw DomainError("element " + std::to_string(e) + " outside [1, " +
                          std::to_string(dataset.domain_size) + "]");
      }
      counts[e - 1] += 1.0;
    }
  }
  return counts;
}

std::uint64_t pad_domain(std::uint64_t domain_size) {
  if (domain_size < 1) throw ParameterError("pad_domain: B must be >= 1");
  return std::bit_ceil(domain_size);
}

namespace {

std::vector<DomainElement> parse_line(const std::string& line,
                                      std::uint64_t domain_size,
                                      std::size_t lineno) {
  std::vector<DomainElement> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (field.empty()) continue;
    std::uint64_t v = 0;
    try {
      v = std::stoull(field);
    } catch (const std::exception&) {
      throw FormatError("line " + std::to_string(lineno) +
                        ": not an integer: '" + field + "'");
    }
    if (v < 1 || v > domain_size) {
      throw DomainError("line " + std::to_string(lineno) + ": element " +
                        std::to_string(v) + " outside [1, " +
                        std::to_string(domain_size) + "]");
    }
    out.push_back(static_cast<DomainElement>(v));
  }
  return out;
}

}  // namespace

Dataset read_dataset(std::istream& in, std::uint64_t domain_size,
                     std::uint32_t sparsity) {
  Dataset ds;
  ds.domain_size = domain_size;
  ds.sparsity = sparsity;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    ds.users.emplace_back(parse_line(line, domain_size, lineno));
  }
  ds.validate();
  return ds;
}

Dataset read_dataset_file(const std::string& path, std::uint64_t domain_size,
                          std::uint32_t sparsity) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset file: " + path);
  return read_dataset(in, domain_size, sparsity);
}

std::vector<std::vector<DomainElement>> read_points_file(
    const std::string& path, std::uint64_t per_dim_size, std::uint32_t dim) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open points file: " + path);
  std::vector<std::vector<DomainElement>> points;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<DomainElement> p = parse_line(line, per_dim_size, lineno);
    if (p.size() != dim) {
      throw FormatError("line " + std::to_string(lineno) + ": expected " +
                        std::to_string(dim) + " coordinates, got " +
                        std::to_string(p.size()));
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace sdp
