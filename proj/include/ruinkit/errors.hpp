#pragma once

#include <stdexcept>
#include <string>

namespace ruinkit {

// Base of every error raised by the library. The CLI maps ConfigError to exit
// code 2 and everything else derived from Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside the domain of the operation (invalid spec, q not in
// (0,1), probe window leaving the harm domain, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration: unknown keys, malformed values, K <= -mu, empty graph.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InsufficientTailData : public Error {
 public:
  InsufficientTailData(double x, long long exceedances, long long required)
      : Error("insufficient tail data at x=" + std::to_string(x) + ": " + std::to_string(exceedances) +
              " exceedances, need " + std::to_string(required)),
        x_(x) {}
  [[nodiscard]] double x() const noexcept { return x_; }

 private:
  double x_;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class DivergentMoment : public Error {
 public:
  using Error::Error;
};

class AmbiguousClassification : public Error {
 public:
  AmbiguousClassification(std::string first, std::string second)
      : Error("ambiguous tail classification: diagnostics support both '" + first + "' and '" + second + "'"),
        first_(std::move(first)),
        second_(std::move(second)) {}
  [[nodiscard]] const std::string& first() const noexcept { return first_; }
  [[nodiscard]] const std::string& second() const noexcept { return second_; }

 private:
  std::string first_;
  std::string second_;
};

}  // namespace ruinkit
