#pragma once

#include <stdexcept>
#include <string>

namespace dks {

// Error taxonomy shared by every module. Each type maps to one failure
// class so callers (and the CLI exit-code logic) can tell them apart.

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct VertexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Work would exceed an enumeration or memory limit.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A bound's hypothesis does not hold for the given inputs.
struct HypothesisError : std::domain_error {
  using std::domain_error::domain_error;
};

struct MissingPlantError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InfeasibleOverlapError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dks
