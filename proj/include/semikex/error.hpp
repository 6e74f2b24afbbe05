#pragma once

#include <stdexcept>
#include <string>

namespace semikex {

// Domain failure: bad input data, violated precondition, failed check.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// An exhaustive search or cycle detection would exceed its configured budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace semikex
