#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwsaf {

/// Base class of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (bad parameters,
/// forward-biased varactor, N < 2, ...).
class domain_error : public error {
 public:
  using error::error;
};

/// A tuning voltage fell outside the validity range of a model.
class range_error : public error {
 public:
  range_error(const std::string& what, std::size_t oscillator, double eta)
      : error(what), oscillator_(oscillator), eta_(eta) {}

  std::size_t oscillator() const noexcept { return oscillator_; }
  double eta() const noexcept { return eta_; }

 private:
  std::size_t oscillator_;
  double eta_;
};

/// Iterative method failed; carries the last residual norm reached.
class numeric_error : public error {
 public:
  numeric_error(const std::string& what, double residual)
      : error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class singular_jacobian : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

/// Invalid or inconsistent run configuration / input file.
class config_error : public error {
 public:
  using error::error;
};

}  // namespace pwsaf
