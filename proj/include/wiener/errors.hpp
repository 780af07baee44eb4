#pragma once

#include <stdexcept>
#include <string>

namespace wiener {

/// Invalid arguments: dimension/descriptor mismatch, bad partitions, t <= 0.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// log_map or geodesic interpolation asked to resolve a point on the cut locus.
class CutLocusError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Numerical failure: series truncation cap exceeded, rejection envelope
/// rebuilds exhausted, oversized quadrature grids.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration schema violation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wiener
