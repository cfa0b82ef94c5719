#pragma once

#include <stdexcept>
#include <string>

namespace bcharge {

/// Invalid model parameters, protocol settings or config files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested Hilbert-space sector is larger than the dense cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operator does not preserve the sector it is built on, or two bases
/// cannot be embedded into each other.
class SectorMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotHermitian : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation energy too close to the spectrum of the complement block.
class SingularResolvent : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace bcharge
