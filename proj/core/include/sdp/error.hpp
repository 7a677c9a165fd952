#pragma once

#include <stdexcept>
#include <string>

namespace sdp {

// Thrown when an element, index or query lies outside its domain.
class DomainError : public std::out_of_range {
 public:
  explicit DomainError(const std::string& what) : std::out_of_range(what) {}
};

// Thrown for invalid protocol or privacy parameters.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Thrown when a user holds more elements than the sparsity bound k allows.
class SparsityError : public std::invalid_argument {
 public:
  explicit SparsityError(const std::string& what)
      : std::invalid_argument(what) {}
};

// Thrown for malformed messages, files or configs.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sdp
