#pragma once

#include <stdexcept>
#include <string>

namespace fracspec {

// Argument outside the mathematical domain of a function (t <= 0, alpha
// outside (0,2], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input such as a non-symmetric form matrix or a bad domain string.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Valid input that this library deliberately does not handle.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterative method failed to converge or an estimate has no usable data.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace detail
}  // namespace fracspec
