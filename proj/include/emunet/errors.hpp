#pragma once

#include <stdexcept>
#include <string>

namespace emunet {

// Error taxonomy mirrors the CLI exit codes: config errors exit with 2,
// missing/corrupt artifacts with 3, validation threshold failures with 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid domain definitions and out-of-range inputs.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Factorization failures, ill-conditioning, inconsistent artifacts.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

// A configured validation threshold was not met.
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace emunet
