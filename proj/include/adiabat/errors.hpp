#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adiabat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with incompatible shapes or otherwise rejected arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class NotHermitian : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Failures of the numerics rather than of the inputs (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when a spectral gap closes (or a level crossing is suspected) at a
/// time sample. Carries the offending sample so callers can report it.
class SpectralFailure : public NumericalError {
 public:
  SpectralFailure(const std::string& what, std::size_t sample, double t)
      : NumericalError(what), sample_(sample), t_(t) {}

  std::size_t sample() const noexcept { return sample_; }
  double time() const noexcept { return t_; }

 private:
  std::size_t sample_;
  double t_;
};

class Degeneracy : public SpectralFailure {
 public:
  using SpectralFailure::SpectralFailure;
};

class LevelCrossing : public SpectralFailure {
 public:
  using SpectralFailure::SpectralFailure;
};

/// Scenario documents that fail to parse or validate (CLI exit code 2).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(key) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace adiabat
