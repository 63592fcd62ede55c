#pragma once

#include <stdexcept>
#include <string>

namespace phasekd {

/// Tensor shapes or dimensions disagree.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A scalar argument is outside its valid range (temperature, dilation, ...).
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An elementwise operation was evaluated outside its domain.
struct NumericDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Parameter-set mismatch: unknown names, wrong shapes, missing gradients.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A class label lies outside [0, C).
struct LabelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A sequence is too short for the requested operation.
struct SequenceLengthError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bad run configuration (unknown key, invalid value). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File format violations and I/O failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phasekd
