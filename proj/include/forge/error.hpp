#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace forge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be parsed at all (bad JSON, wrong shape).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input parsed but violates the contract. Every violation found is listed.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Some sine in a denominator, a triangle or a pyramid is too close to collapse.
// The continuation treats this as a signal to shrink its step.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class FlipError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

class EmbedError : public Error {
 public:
  using Error::Error;
};

}  // namespace forge
