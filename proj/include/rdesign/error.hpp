#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rdesign {

enum class ErrorKind {
  InvalidInput,
  Singular,
  DomainError,
  NonSpanningPool,
  SampleSizeTooSmall,
};

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

/// A matrix that had to be inverted is (numerically) singular.
class Singular : public Error {
 public:
  explicit Singular(double lambda_min)
      : Error(ErrorKind::Singular, "matrix is singular (lambda_min = " + std::to_string(lambda_min) + ")"),
        lambda_min_(lambda_min) {}
  double lambda_min() const noexcept { return lambda_min_; }

 private:
  double lambda_min_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::DomainError, what) {}
};

class NonSpanningPool : public Error {
 public:
  NonSpanningPool() : Error(ErrorKind::NonSpanningPool, "experiment pool does not span R^d") {}
};

class SampleSizeTooSmall : public Error {
 public:
  explicit SampleSizeTooSmall(std::uint64_t n_min)
      : Error(ErrorKind::SampleSizeTooSmall, "sample size must exceed " + std::to_string(n_min)),
        n_min_(n_min) {}
  std::uint64_t n_min() const noexcept { return n_min_; }

 private:
  std::uint64_t n_min_;
};

}  // namespace rdesign
