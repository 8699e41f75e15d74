#pragma once

#include <stdexcept>
#include <string>

namespace lemmings {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensionalities disagree (bag vs. model, instance vs. anchors).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A dataset violates a structural requirement (empty, single class, no pairs).
class DatasetError : public Error {
 public:
  using Error::Error;
};

// A hyperparameter or argument is out of its domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message carries the file position.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A non-finite value appeared during training or scoring.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lemmings
