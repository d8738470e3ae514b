#pragma once

#include <stdexcept>
#include <string>

namespace vibraug {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input that fails to parse. Carries the 1-based line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string& msg, int line = 0) : Error(msg), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

// Thrown when augmented data is about to cross the train/test boundary.
class LeakageError : public Error {
public:
  using Error::Error;
};

// Optimization produced a non-finite loss or parameter.
class NumericError : public Error {
public:
  explicit NumericError(const std::string& msg, int epoch = -1)
      : Error(msg), epoch_(epoch) {}
  int epoch() const { return epoch_; }

private:
  int epoch_;
};

}  // namespace vibraug
