#pragma once

#include <stdexcept>
#include <string>

namespace lexfa {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text; the message names file and line where known.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed record that violates the expected schema (missing field, wrong type).
class SchemaError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
};

/// Missing or unusable configuration input (paths, required files, option values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyDictionaryError : public Error {
 public:
  using Error::Error;
};

class EmptyMatrixError : public Error {
 public:
  using Error::Error;
};

/// A column with zero variance reached a computation that needs a standardized column.
class DegenerateColumnError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A stage was asked to run without the artifact it reads from disk.
class DependencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexfa
