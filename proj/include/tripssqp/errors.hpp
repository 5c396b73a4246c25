#pragma once

#include <stdexcept>
#include <string>

namespace tripssqp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A·Aᵀ (or G·Gᵀ) is numerically singular at the current iterate.
class SingularConstraintError : public Error {
 public:
  using Error::Error;
};

/// The merit parameter exceeded its safety cap.
class MeritDivergenceError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Non-positive slack passed to a barrier evaluation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Base for everything that can go wrong while reading or generating data.
class DatasetError : public Error {
 public:
  using Error::Error;
};

class CsvParseError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

class EmptyDatasetError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

/// Labels are not binary after mapping.
class LabelError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

/// The generated equality matrix failed the full-row-rank check.
class RankError : public DatasetError {
 public:
  using DatasetError::DatasetError;
};

}  // namespace tripssqp
