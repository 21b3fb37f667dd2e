#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace elolab {

// Step size outside the region where the mean-square recursion is stable.
class StabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical procedure (e.g. a bracketed search) failed to produce a result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace detail
}  // namespace elolab
