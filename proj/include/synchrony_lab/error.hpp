#pragma once

#include <stdexcept>
#include <string>

namespace synchrony_lab {

/// Base of every error raised by the library. `code()` is a stable
/// snake_case identifier used by the CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// (1 + beta*k)^2 - beta^2 <= 0: the chart's simultaneity surfaces are not spacelike.
class DegenerateConvention : public Error {
 public:
  DegenerateConvention(double beta, double k);
  double beta() const noexcept { return beta_; }
  double k() const noexcept { return k_; }

 private:
  double beta_;
  double k_;
};

class ConventionOutOfRange : public Error {
 public:
  explicit ConventionOutOfRange(double k_prime);
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

class ChartMismatch : public Error {
 public:
  ChartMismatch(const std::string& expected, const std::string& actual);
};

class UnresolvableChase : public Error {
 public:
  UnresolvableChase(double signal_speed, double beta);
};

class NotSynchronized : public Error {
 public:
  NotSynchronized() : Error("not_synchronized", "lattice clocks have not been synchronized") {}
};

class IllConditioned : public Error {
 public:
  explicit IllConditioned(const std::string& what) : Error("ill_conditioned", what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

/// Malformed scenario or sample file.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error("validation_error", what) {}
};

}  // namespace synchrony_lab
